#include "s7sim/noise.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace s7sim::noise {

using nlohmann::json;

KrausChannel amplitude_damping(double t1, double duration, int dim, int site) {
    if (t1 <= 0.0) throw std::invalid_argument("relaxation time must be positive");
    if (duration < 0.0) throw std::invalid_argument("duration must be nonnegative");
    const double p1 = 1.0 - std::exp(-duration / t1);
    const double p2 = 1.0 - std::exp(-2.0 * duration / t1);  // |2> -> |1>

    KrausChannel ch;
    ch.sites = {site};
    std::vector<cplx> k0(static_cast<std::size_t>(dim) * dim, cplx(0.0, 0.0));
    k0[0 * dim + 0] = 1.0;
    k0[1 * dim + 1] = std::sqrt(1.0 - p1);
    if (dim > 2) k0[2 * dim + 2] = std::sqrt(1.0 - p2);
    ch.operators.push_back(std::move(k0));

    std::vector<cplx> k1(static_cast<std::size_t>(dim) * dim, cplx(0.0, 0.0));
    k1[0 * dim + 1] = std::sqrt(p1);
    ch.operators.push_back(std::move(k1));

    if (dim > 2) {
        std::vector<cplx> k2(static_cast<std::size_t>(dim) * dim, cplx(0.0, 0.0));
        k2[1 * dim + 2] = std::sqrt(p2);
        ch.operators.push_back(std::move(k2));
    }
    return ch;
}

KrausChannel phase_damping(double t_phi, double duration, int dim, int site) {
    if (t_phi <= 0.0) throw std::invalid_argument("dephasing time must be positive");
    if (duration < 0.0) throw std::invalid_argument("duration must be nonnegative");
    const double lam = duration / t_phi;
    // Coherence decay matrix m[i][j] = exp(-lam (i-j)^2) is a Gaussian kernel,
    // hence PSD; its eigendecomposition gives diagonal Kraus operators.
    Eigen::MatrixXd m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = std::exp(-lam * (i - j) * (i - j));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    KrausChannel ch;
    ch.sites = {site};
    for (int k = 0; k < dim; ++k) {
        const double mu = std::max(es.eigenvalues()(k), 0.0);
        if (mu < 1e-300) continue;
        std::vector<cplx> op(static_cast<std::size_t>(dim) * dim, cplx(0.0, 0.0));
        for (int i = 0; i < dim; ++i) op[i * dim + i] = std::sqrt(mu) * es.eigenvectors()(i, k);
        ch.operators.push_back(std::move(op));
    }
    return ch;
}

double pure_dephasing_rate(double t1, double t2) {
    if (t1 <= 0.0 || t2 <= 0.0) throw std::invalid_argument("coherence times must be positive");
    return 1.0 / t2 - 1.0 / (2.0 * t1);
}

double offsweetspot_dephasing_rate(double sqrt_a_phi0, double d_phi_hz_per_phi0,
                                   double t_phi_max) {
    if (sqrt_a_phi0 < 0.0 || d_phi_hz_per_phi0 < 0.0)
        throw std::invalid_argument("flux-noise parameters must be nonnegative");
    const double base = t_phi_max > 0.0 ? 1.0 / t_phi_max : 0.0;
    return 2.0 * M_PI * std::sqrt(std::log(2.0)) * sqrt_a_phi0 * d_phi_hz_per_phi0 + base;
}

IdleChannel idle_channel(double t1, double t_phi, double duration, int dim, int site) {
    return {amplitude_damping(t1, duration, dim, site), phase_damping(t_phi, duration, dim, site)};
}

const TransmonParams& DeviceParams::by_label(const std::string& label) const {
    for (const auto& t : transmons)
        if (t.label == label) return t;
    throw std::invalid_argument("no transmon labeled " + label);
}

namespace {
std::vector<std::vector<double>> default_assignment(double f_ro, double p1_given_2) {
    return {
        {f_ro, 1.0 - f_ro, 0.0},
        {1.0 - f_ro, f_ro, p1_given_2},
        {0.0, 0.0, 1.0 - p1_given_2},
    };
}
}  // namespace

DeviceParams DeviceParams::from_json_text(const std::string& text) {
    json j = json::parse(text);
    DeviceParams dev;
    dev.sqrt_a_phi0 = j.value("flux_noise_sqrt_a_uphi0", 3.0) * 1e-6;
    for (const auto& t : j.at("transmons")) {
        TransmonParams p;
        p.label = t.at("label").get<std::string>();
        p.freq_ghz = t.value("freq_ghz", 0.0);
        if (t.contains("anharmonicity_mhz") && !t["anharmonicity_mhz"].is_null())
            p.anharmonicity_mhz = t["anharmonicity_mhz"].get<double>();
        p.readout_freq_ghz = t.value("readout_freq_ghz", 0.0);
        p.t1 = t.at("t1_us").get<double>() * 1e-6;
        p.t2_star = t.value("t2_star_us", 0.0) * 1e-6;
        p.t2_echo = t.at("t2_echo_us").get<double>() * 1e-6;
        if (p.t2_echo > 2.0 * p.t1 + 1e-12)
            throw std::invalid_argument(p.label + ": T2 exceeds 2*T1");
        p.readout_fidelity = t.at("readout_fidelity").get<double>();
        p.p_excited = t.value("p_excited", 0.0);
        if (p.readout_fidelity < 0.0 || p.readout_fidelity > 1.0 || p.p_excited < 0.0 ||
            p.p_excited > 1.0)
            throw std::invalid_argument(p.label + ": probability out of range");
        p.d_phi_cz = t.value("d_phi_cz_ghz_per_phi0", 0.0) * 1e9;
        p.d_phi_park = t.value("d_phi_park_ghz_per_phi0", 0.0) * 1e9;
        const double p12 = t.value("p_declare1_given2", 1.0);
        if (t.contains("assignment")) {
            p.assignment = t["assignment"].get<std::vector<std::vector<double>>>();
            if (p.assignment.size() != 3 || p.assignment[0].size() != 3)
                throw std::invalid_argument(p.label + ": assignment matrix must be 3x3");
            for (int col = 0; col < 3; ++col) {
                double sum = 0.0;
                for (int row = 0; row < 3; ++row) sum += p.assignment[row][col];
                if (std::abs(sum - 1.0) > 1e-9)
                    throw std::invalid_argument(p.label + ": assignment columns must sum to 1");
            }
        } else {
            p.assignment = default_assignment(p.readout_fidelity, p12);
        }
        dev.transmons.push_back(std::move(p));
    }
    if (j.contains("zz_coupling_khz")) {
        for (const auto& row : j["zz_coupling_khz"]) {
            std::vector<double> r;
            for (const auto& v : row) r.push_back(v.get<double>() * 1e3);
            dev.zz_coupling_hz.push_back(std::move(r));
        }
    }
    if (j.contains("cz_phases")) {
        for (auto it = j["cz_phases"].begin(); it != j["cz_phases"].end(); ++it) {
            const auto& v = it.value();
            dev.cz_phase_table[it.key()] = {v.value("p01", 0.0), v.value("p10", 0.0),
                                            v.value("p11", M_PI)};
        }
    }
    return dev;
}

DeviceParams DeviceParams::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open device parameter file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

DeviceParams DeviceParams::ideal() {
    DeviceParams dev;
    static const char* labels[] = {"D1", "D2", "D3", "D4", "A1", "A2", "A3"};
    for (const char* l : labels) {
        TransmonParams p;
        p.label = l;
        // effectively infinite coherence so higher model levels stay exact
        p.t1 = 1e6;
        p.t2_star = 2e6;
        p.t2_echo = 2e6;
        p.readout_fidelity = 1.0;
        p.assignment = default_assignment(1.0, 1.0);
        dev.transmons.push_back(std::move(p));
    }
    return dev;
}

NoiseModel NoiseModel::make(int level, const DeviceParams& device, double l1) {
    if (level < 0 || level > 5) throw std::invalid_argument("noise level must be in 0..5");
    if (l1 < 0.0 || l1 > 0.25) throw std::invalid_argument("leakage per CZ must be in [0, 0.25]");
    NoiseModel m;
    m.level = level;
    m.l1 = (level >= 5) ? l1 : 0.0;
    m.device = device;
    return m;
}

std::vector<int> NoiseModel::register_dims() const {
    if (with_leakage()) return {3, 3, 3, 3, 3, 2, 2};  // leakage lands on D1..D4 and A1
    return std::vector<int>(7, 2);
}

double NoiseModel::residual_excitation(int site) const {
    if (!with_spam()) return 0.0;
    return device.transmons.at(site).p_excited;
}

Povm NoiseModel::readout_povm(int site, int dim) const {
    Povm povm;
    if (!with_spam()) {
        for (int i = 0; i < dim; ++i) {
            PovmElement el;
            el.outcome = i;
            el.diag.assign(dim, 0.0);
            el.diag[i] = 1.0;
            povm.push_back(std::move(el));
        }
        return povm;
    }
    const auto& a = device.transmons.at(site).assignment;
    for (int i = 0; i < 3; ++i) {
        PovmElement el;
        el.outcome = i;
        el.diag.assign(dim, 0.0);
        bool nonzero = false;
        for (int jstate = 0; jstate < dim; ++jstate) {
            el.diag[jstate] = std::sqrt(a[i][jstate]);
            nonzero |= a[i][jstate] > 0.0;
        }
        if (nonzero) povm.push_back(std::move(el));
    }
    return povm;
}

double NoiseModel::dephasing_rate(int site, bool fluxed_cz, bool parked) const {
    if (!with_decoherence()) return 0.0;
    const auto& t = device.transmons.at(site);
    const double base = pure_dephasing_rate(t.t1, t.t2_echo);
    if (!with_flux_dephasing() || (!fluxed_cz && !parked)) return base;
    const double d_phi = fluxed_cz ? t.d_phi_cz : t.d_phi_park;
    return offsweetspot_dephasing_rate(device.sqrt_a_phi0, d_phi,
                                       base > 0.0 ? 1.0 / base : 0.0);
}

double NoiseModel::relaxation_time(int site) const {
    return device.transmons.at(site).t1;
}

std::array<double, 3> NoiseModel::cz_dressing(const std::string& ancilla,
                                              const std::string& data) const {
    if (!with_zz_phases()) return {0.0, 0.0, M_PI};
    const std::string key = ancilla + "-" + data;
    auto it = device.cz_phase_table.find(key);
    if (it == device.cz_phase_table.end()) return {0.0, 0.0, M_PI};
    return it->second;
}

}  // namespace s7sim::noise
