// Command-line front end: experiment dispatch, CSV/SVG emission, run
// manifests. CSVs are the contract; the SVG plots are conveniences.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "s7sim/calibration.hpp"
#include "s7sim/experiments.hpp"
#include "s7sim/io.hpp"
#include "s7sim/kernels.hpp"
#include "s7sim/tomography.hpp"

using nlohmann::json;
using namespace s7sim;

namespace {

constexpr const char* kVersion = "s7sim 0.1.0";
constexpr double kPi = 3.14159265358979323846;

struct RunConfig {
    std::string device_file = "data/device_params.json";
    std::string out_dir = "out";
    std::string config_file;
    int noise_level = 0;
    double l1 = 0.0;
    std::string scheme = "pipelined";
    std::string mode = "exact";
    long shots = 10000;
    std::uint64_t seed = 1;
    int cycles = 15;
    int points = 17;
    double theta = 0.0;
    double phi = 0.0;
    std::string basis = "Z";
    std::string gate = "all";
    std::string check = "Z13";
    std::vector<double> l1_grid = {0.01, 0.02, 0.05, 0.08};
    std::string input_file;
    std::string calib_file;
    bool serial = false;

    json to_json() const {
        json j;
        j["device"] = device_file;
        j["out"] = out_dir;
        j["noise"] = noise_level;
        j["l1"] = l1;
        j["scheme"] = scheme;
        j["mode"] = mode;
        j["shots"] = shots;
        j["seed"] = seed;
        j["cycles"] = cycles;
        j["points"] = points;
        j["theta"] = theta;
        j["phi"] = phi;
        j["basis"] = basis;
        j["gate"] = gate;
        j["check"] = check;
        j["l1_grid"] = l1_grid;
        j["input"] = input_file;
        j["calib"] = calib_file;
        j["serial"] = serial;
        return j;
    }
};

class Manifest {
  public:
    Manifest(const std::string& command, const RunConfig& cfg)
        : command_(command), cfg_(cfg), start_(std::chrono::steady_clock::now()) {}

    void add_output(const std::string& name) { outputs_.push_back(name); }

    void write() const {
        json j;
        j["command"] = command_;
        j["config"] = cfg_.to_json();
        j["config_hash"] = io::fnv1a_hex(cfg_.to_json().dump());
        j["seed"] = cfg_.seed;
        j["version"] = kVersion;
        j["wall_time_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        j["outputs"] = outputs_;
        io::write_file(cfg_.out_dir + "/manifest.json", j.dump(2) + "\n");
    }

  private:
    std::string command_;
    const RunConfig& cfg_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> outputs_;
};

void emit(Manifest& manifest, const RunConfig& cfg, const std::string& name,
          const std::string& content) {
    io::write_file(cfg.out_dir + "/" + name, content);
    manifest.add_output(name);
}

noise::NoiseModel load_model(const RunConfig& cfg) {
    noise::DeviceParams dev = noise::DeviceParams::from_json_file(cfg.device_file);
    return noise::NoiseModel::make(cfg.noise_level, dev, cfg.l1);
}

// Paper-reported values quoted next to the simulated numbers in summary rows.
struct Reference {
    const char* key;
    double percent;
};
const std::vector<Reference>& reference_table() {
    static const std::vector<Reference> t = {
        {"init/0L/ft", 99.83},        {"init/1L/ft", 99.97},
        {"init/+L/nonft", 97.02},     {"init/+L/ft", 99.78},
        {"init/-L/nonft", 95.54},     {"init/-L/ft", 99.64},
        {"meas/ZL/polar", 99.4},      {"meas/XL/polar", 96.4},
        {"meas/XL/equatorial", 95.8}, {"meas/YL/equatorial", 87.5},
        {"gate/ZL", 98.1},            {"gate/XL", 97.9},
        {"gate/XL90", 95.6},          {"gate/TL", 97.3},
        {"rate/pipelined", 45.0},     {"rate/ratio", 97.0},
    };
    return t;
}
std::string reference_for(const std::string& key) {
    for (const auto& r : reference_table())
        if (key == r.key) return io::format_double(r.percent);
    return "";
}

int cmd_init_suite(const RunConfig& cfg) {
    Manifest manifest("init-suite", cfg);
    const auto model = load_model(cfg);
    const auto rows = expt::run_cardinal_init_suite(model, circuits::scheme_from_string(cfg.scheme));
    io::Csv table({"state", "variant", "f4q", "fl", "retained"});
    io::Csv summary({"operation", "name", "variant", "metric", "simulated_pct", "paper_pct"});
    for (const auto& r : rows) {
        table.add_row({r.state, r.variant, io::format_double(r.f4q), io::format_double(r.fl),
                       io::format_double(r.retained)});
        summary.add_row({"init", r.state, r.variant, "FL", io::format_double(100.0 * r.fl),
                         reference_for("init/" + r.state + "/" + r.variant)});
    }
    emit(manifest, cfg, "init_suite.csv", table.str());
    emit(manifest, cfg, "summary.csv", summary.str());
    std::vector<io::Series> series(2);
    series[0].name = "F4Q";
    series[1].name = "FL";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        series[0].x.push_back(static_cast<double>(i));
        series[0].y.push_back(rows[i].f4q);
        series[1].x.push_back(static_cast<double>(i));
        series[1].y.push_back(rows[i].fl);
    }
    emit(manifest, cfg, "plot.svg",
         io::svg_line_plot("logical initialization", "state index", "fidelity", series));
    manifest.write();
    return 0;
}

int cmd_measure_sweep(const RunConfig& cfg) {
    Manifest manifest("measure-sweep", cfg);
    const auto model = load_model(cfg);
    const auto scheme = circuits::scheme_from_string(cfg.scheme);
    const auto eq = expt::run_logical_measurement_sweep(true, cfg.points, model, scheme);
    const auto pol = expt::run_logical_measurement_sweep(false, cfg.points, model, scheme);

    io::Csv c({"phi_rad", "zl", "xl", "yl"});
    io::Csv b({"phi_rad", "p_zl", "p_xl", "p_yl"});
    for (const auto& pt : eq.points) {
        c.add_row(std::vector<double>{pt.angle, pt.zl, pt.xl, pt.yl});
        b.add_row(std::vector<double>{pt.angle, pt.p_zl, pt.p_xl, pt.p_yl});
    }
    io::Csv e({"theta_rad", "zl", "xl", "yl"});
    io::Csv f({"theta_rad", "p_zl", "p_xl", "p_yl"});
    for (const auto& pt : pol.points) {
        e.add_row(std::vector<double>{pt.angle, pt.zl, pt.xl, pt.yl});
        f.add_row(std::vector<double>{pt.angle, pt.p_zl, pt.p_xl, pt.p_yl});
    }
    emit(manifest, cfg, "fig2c.csv", c.str());
    emit(manifest, cfg, "fig2b.csv", b.str());
    emit(manifest, cfg, "fig2e.csv", e.str());
    emit(manifest, cfg, "fig2f.csv", f.str());

    io::Csv summary({"operation", "name", "variant", "metric", "simulated_pct", "paper_pct"});
    summary.add_row({"meas", "ZL", "polar", "FLR",
                     io::format_double(100.0 * pol.flr(pol.amp_zl)), reference_for("meas/ZL/polar")});
    summary.add_row({"meas", "XL", "polar", "FLR",
                     io::format_double(100.0 * pol.flr(pol.amp_xl)), reference_for("meas/XL/polar")});
    summary.add_row({"meas", "XL", "equatorial", "FLR",
                     io::format_double(100.0 * eq.flr(eq.amp_xl)),
                     reference_for("meas/XL/equatorial")});
    summary.add_row({"meas", "YL", "equatorial", "FLR",
                     io::format_double(100.0 * eq.flr(eq.amp_yl)),
                     reference_for("meas/YL/equatorial")});
    emit(manifest, cfg, "summary.csv", summary.str());

    std::vector<io::Series> series;
    io::Series sx{"<XL>", {}, {}}, sy{"<YL>", {}, {}}, sz{"<ZL>", {}, {}};
    for (const auto& pt : eq.points) {
        sx.x.push_back(pt.angle);
        sx.y.push_back(pt.xl);
        sy.x.push_back(pt.angle);
        sy.y.push_back(pt.yl);
        sz.x.push_back(pt.angle);
        sz.y.push_back(pt.zl);
    }
    series = {sx, sy, sz};
    emit(manifest, cfg, "plot.svg",
         io::svg_line_plot("equatorial sweep", "phi (rad)", "logical average", series));
    manifest.write();
    return 0;
}

int cmd_gate_tomo(const RunConfig& cfg) {
    Manifest manifest("gate-tomo", cfg);
    const auto model = load_model(cfg);
    const auto scheme = circuits::scheme_from_string(cfg.scheme);
    std::vector<std::string> gates;
    if (cfg.gate == "all")
        gates = {"TL", "XL90", "XL", "ZL"};
    else
        gates = {cfg.gate};
    io::Csv summary({"operation", "name", "variant", "metric", "simulated_pct", "paper_pct"});
    for (const auto& g : gates) {
        const auto spec = circuits::gate_from_string(g);
        const auto res = tomo::logical_process_tomography(spec, model, scheme);
        emit(manifest, cfg, "lptm_" + g + ".csv", tomo::ptm_to_csv(res.physical));
        emit(manifest, cfg, "lptm_" + g + "_raw.csv", tomo::ptm_to_csv(res.raw));
        summary.add_row({"gate", g, res.fidelity < 1.0 - 1e-9 ? "noisy" : "ideal", "FLG",
                         io::format_double(100.0 * res.fidelity), reference_for("gate/" + g)});
        std::printf("%s: FLG = %.6f\n", g.c_str(), res.fidelity);
    }
    emit(manifest, cfg, "summary.csv", summary.str());
    manifest.write();
    return 0;
}

int cmd_stabilize(const RunConfig& cfg) {
    Manifest manifest("stabilize", cfg);
    const auto model = load_model(cfg);
    const auto scheme = circuits::scheme_from_string(cfg.scheme);
    const auto basis = circuits::basis_from_string(cfg.basis);
    const circuits::PrepAngles angles{cfg.theta, cfg.phi};

    const double tmin =
        [&] {
            double t = 1e9;
            for (const auto& tr : model.device.transmons) t = std::min(t, tr.t1);
            return t;
        }();
    const double tmax = [&] {
        double t = 0.0;
        for (const auto& tr : model.device.transmons) t = std::max(t, tr.t1);
        return t;
    }();

    io::Csv c4c({"cycle", "time_ns", "logical_value", "op_value", "t1_env_fast", "t1_env_slow"});
    io::Csv c4d({"cycle", "p"});
    std::vector<double> ns, ps;
    std::vector<expt::DetectionRecord> recs(cfg.cycles);
#pragma omp parallel for schedule(dynamic)
    for (int n = 1; n <= cfg.cycles; ++n)
        recs[n - 1] = expt::run_detection(angles, scheme, n, model, basis);
    for (int n = 1; n <= cfg.cycles; ++n) {
        const auto& rec = recs[n - 1];
        if (rec.zero_branch) continue;
        const double t = rec.wall_clock_ns;
        c4c.add_row(std::vector<double>{static_cast<double>(n), t, rec.assembly_logical_value,
                                        basis == circuits::LogicalBasis::Z   ? rec.op_z
                                        : basis == circuits::LogicalBasis::X ? rec.op_x
                                                                             : rec.op_y,
                                        std::exp(-t * 1e-9 / tmin), std::exp(-t * 1e-9 / tmax)});
        c4d.add_row(std::vector<double>{static_cast<double>(n), rec.retained_fraction});
        ns.push_back(n);
        ps.push_back(rec.retained_fraction);
    }
    emit(manifest, cfg, "fig4c.csv", c4c.str());
    emit(manifest, cfg, "fig4d.csv", c4d.str());
    io::Csv retention({"cycle", "post_selected_fraction"});
    for (std::size_t i = 0; i < ns.size(); ++i)
        retention.add_row(std::vector<double>{ns[i], ps[i]});
    emit(manifest, cfg, "retention.csv", retention.str());
    if (ns.size() >= 3) {
        const auto fit = calib::fit_detection_rate(ns, ps);
        io::Csv g({"amplitude", "gamma", "residual"});
        g.add_row(std::vector<double>{fit.amplitude, fit.gamma, fit.residual});
        emit(manifest, cfg, "decay_fit.csv", g.str());
        std::printf("gamma = %.4f (amplitude %.4f)\n", fit.gamma, fit.amplitude);
    }
    io::Series sp{"P(n)", ns, ps};
    emit(manifest, cfg, "plot.svg",
         io::svg_line_plot("post-selected fraction", "cycle", "P", {sp}, true));
    manifest.write();
    return 0;
}

int cmd_compare_schemes(const RunConfig& cfg) {
    Manifest manifest("compare-schemes", cfg);
    const auto model = load_model(cfg);
    const auto cmp = expt::compare_schemes(cfg.cycles, model);
    io::Csv s3({"state", "scheme", "cycle", "time_ns", "op_value", "p"});
    for (const auto& [key, recs] : cmp.records) {
        const auto slash = key.find('/');
        const std::string state = key.substr(0, slash), scheme = key.substr(slash + 1);
        for (const auto& rec : recs) {
            if (rec.zero_branch) continue;
            s3.add_row({state, scheme, io::format_double(rec.cycles),
                        io::format_double(rec.wall_clock_ns),
                        io::format_double(rec.assembly_logical_value),
                        io::format_double(rec.retained_fraction)});
        }
    }
    io::Csv ratios({"state", "gamma_pipelined", "gamma_parallel", "ratio"});
    for (const auto& e : cmp.entries)
        ratios.add_row({e.state, io::format_double(e.gamma_pipelined),
                        io::format_double(e.gamma_parallel), io::format_double(e.ratio)});
    ratios.add_row({"average", "", "", io::format_double(cmp.average_ratio)});
    emit(manifest, cfg, "figS3.csv", s3.str());
    emit(manifest, cfg, "ratios.csv", ratios.str());
    std::printf("average gamma ratio pipelined/parallel = %.4f\n", cmp.average_ratio);
    manifest.write();
    return 0;
}

int cmd_ablation(const RunConfig& cfg) {
    Manifest manifest("ablation", cfg);
    noise::DeviceParams dev = noise::DeviceParams::from_json_file(cfg.device_file);
    const auto res = expt::run_model_ablation(dev, cfg.l1_grid, cfg.cycles,
                                              circuits::scheme_from_string(cfg.scheme));
    io::Csv a({"model", "cycle", "p"});
    for (const auto& curve : res.model_curves)
        for (std::size_t i = 0; i < curve.cycles.size(); ++i)
            a.add_row(std::vector<double>{static_cast<double>(curve.level), curve.cycles[i],
                                          curve.retained[i]});
    io::Csv b({"l1", "cycle", "p"});
    for (const auto& curve : res.l1_curves)
        for (std::size_t i = 0; i < curve.cycles.size(); ++i)
            b.add_row(std::vector<double>{curve.l1, curve.cycles[i], curve.retained[i]});
    io::Csv g({"model", "l1", "gamma", "amplitude", "residual", "paper_gamma_pct"});
    for (const auto& curve : res.model_curves)
        g.add_row({io::format_double(curve.level), "0", io::format_double(curve.fit.gamma),
                   io::format_double(curve.fit.amplitude), io::format_double(curve.fit.residual),
                   ""});
    for (const auto& curve : res.l1_curves)
        g.add_row({"5", io::format_double(curve.l1), io::format_double(curve.fit.gamma),
                   io::format_double(curve.fit.amplitude), io::format_double(curve.fit.residual),
                   reference_for("rate/pipelined")});
    emit(manifest, cfg, "figS5a.csv", a.str());
    emit(manifest, cfg, "figS5b.csv", b.str());
    emit(manifest, cfg, "gammas.csv", g.str());
    std::vector<io::Series> series;
    for (const auto& curve : res.model_curves) {
        io::Series s{"model " + std::to_string(curve.level), curve.cycles, curve.retained};
        series.push_back(std::move(s));
    }
    for (const auto& curve : res.l1_curves) {
        io::Series s{"L1 " + io::format_double(curve.l1), curve.cycles, curve.retained};
        series.push_back(std::move(s));
    }
    emit(manifest, cfg, "plot.svg",
         io::svg_line_plot("model ablation", "cycle", "P", series, true));
    for (const auto& curve : res.l1_curves)
        std::printf("L1 = %.3f: gamma = %.4f (paper pipelined rate ~0.45)\n", curve.l1,
                    curve.fit.gamma);
    manifest.write();
    return 0;
}

int cmd_fit(const RunConfig& cfg) {
    Manifest manifest("fit", cfg);
    if (cfg.input_file.empty()) throw CLI::ValidationError("--input is required for fit");
    auto cols = io::read_csv_columns(cfg.input_file);
    if (!cols.count("cycle") || !cols.count("post_selected_fraction"))
        throw CLI::ValidationError("fit input needs columns cycle,post_selected_fraction");
    std::vector<double> shots;
    if (cols.count("shots")) shots = cols["shots"];
    const auto fit = calib::fit_detection_rate(cols["cycle"], cols["post_selected_fraction"], shots);
    io::Csv g({"amplitude", "gamma", "residual"});
    g.add_row(std::vector<double>{fit.amplitude, fit.gamma, fit.residual});
    emit(manifest, cfg, "decay_fit.csv", g.str());
    io::Series data{"data", cols["cycle"], cols["post_selected_fraction"]};
    io::Series fitted{"fit", cols["cycle"], {}};
    for (double n : cols["cycle"])
        fitted.y.push_back(fit.amplitude * std::pow(1.0 - fit.gamma, n));
    emit(manifest, cfg, "plot.svg",
         io::svg_line_plot("retention fit", "cycle", "P", {data, fitted}, true));
    std::printf("A = %.6f, gamma = %.6f, residual = %.3g\n", fit.amplitude, fit.gamma,
                fit.residual);
    manifest.write();
    return 0;
}

int cmd_calibrate_zz(const RunConfig& cfg) {
    Manifest manifest("calibrate-zz", cfg);
    const auto model = load_model(cfg);
    const auto check = circuits::check_from_string(cfg.check);
    const auto sys = calib::generate_ramsey_phases(check, model);
    io::Csv phases({"row_index", "phase_rad"});
    for (std::size_t i = 0; i < sys.phases.size(); ++i)
        phases.add_row(std::vector<double>{static_cast<double>(i), sys.phases[i]});
    emit(manifest, cfg, "ramsey_phases.csv", phases.str());
    const auto sol = calib::solve_cz_phases(sys);
    io::Csv solved({"unknown", "value_rad"});
    for (std::size_t j = 0; j < sol.values.size(); ++j)
        solved.add_row({sys.unknown_names[j], io::format_double(sol.values[j])});
    solved.add_row({"residual_rms", io::format_double(sol.residual)});
    emit(manifest, cfg, "solved_phases.csv", solved.str());
    json table;
    for (const auto& [key, v] : sol.to_phase_table(check))
        table[key] = {{"p01", v[0]}, {"p10", v[1]}, {"p11", v[2]}};
    emit(manifest, cfg, "cz_phase_table.json", table.dump(2) + "\n");
    std::printf("solved %zu phases, residual %.3g rad\n", sol.values.size(), sol.residual);
    manifest.write();
    return 0;
}

int cmd_leakage_estimate(const RunConfig& cfg) {
    Manifest manifest("leakage-estimate", cfg);
    std::map<int, std::vector<double>> shots_per_cycle;
    std::array<std::vector<double>, 3> cal;
    if (!cfg.input_file.empty()) {
        auto cols = io::read_csv_columns(cfg.input_file);
        if (!cols.count("cycle") || !cols.count("voltage"))
            throw CLI::ValidationError("leakage input needs columns cycle,voltage");
        for (std::size_t i = 0; i < cols["cycle"].size(); ++i)
            shots_per_cycle[static_cast<int>(cols["cycle"][i])].push_back(cols["voltage"][i]);
        if (cfg.calib_file.empty())
            throw CLI::ValidationError("--calib with columns state,voltage is required");
        auto ccols = io::read_csv_columns(cfg.calib_file);
        for (std::size_t i = 0; i < ccols["state"].size(); ++i)
            cal[static_cast<int>(ccols["state"][i])].push_back(ccols["voltage"][i]);
    } else {
        // synthetic voltages from the Markov leakage chain at the configured
        // leakage rate, two CZs per cycle per transmon
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> g0(0.0, 0.16), g1(1.0, 0.16), g2(2.1, 0.16);
        std::vector<int> cycles;
        for (int n = 1; n <= cfg.cycles; ++n) cycles.push_back(n);
        const auto series =
            calib::markov_leakage_series(cycles, cfg.l1, 2, 840e-9, 40e-6);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (std::size_t i = 0; i < cycles.size(); ++i) {
            auto& v = shots_per_cycle[cycles[i]];
            for (long s = 0; s < cfg.shots; ++s) {
                const double r = u(rng);
                if (r < series[i])
                    v.push_back(g2(rng));
                else
                    v.push_back(u(rng) < 0.5 ? g1(rng) : g0(rng));
            }
        }
        for (int s = 0; s < 4000; ++s) {
            cal[0].push_back(g0(rng));
            cal[1].push_back(g1(rng));
            cal[2].push_back(g2(rng));
        }
    }
    const auto est = calib::estimate_leakage(shots_per_cycle, cal);
    io::Csv frac({"cycle", "leaked_fraction"});
    for (std::size_t i = 0; i < est.cycles.size(); ++i)
        frac.add_row(std::vector<double>{static_cast<double>(est.cycles[i]),
                                         est.leaked_fraction[i]});
    emit(manifest, cfg, "leakage_fractions.csv", frac.str());
    io::Csv vm({"component", "mean", "sigma", "weight"});
    for (int c = 0; c < 3; ++c)
        vm.add_row(std::vector<double>{static_cast<double>(c), est.model.components[c].mean,
                                       est.model.components[c].sigma,
                                       est.model.components[c].weight});
    vm.add_row(std::vector<double>{-1.0, est.model.threshold,
                                   est.model.low_confidence ? 1.0 : 0.0,
                                   est.model.degenerate ? 1.0 : 0.0});
    emit(manifest, cfg, "voltage_model.csv", vm.str());
    const auto fit = calib::estimate_l1_markov(est.cycles, est.leaked_fraction, 2, 840e-9, 40e-6);
    io::Csv l1csv({"l1", "residual", "identifiable"});
    l1csv.add_row(std::vector<double>{fit.l1, fit.residual, fit.identifiable ? 1.0 : 0.0});
    emit(manifest, cfg, "l1_fit.csv", l1csv.str());
    io::Series s{"leaked", {}, {}};
    for (std::size_t i = 0; i < est.cycles.size(); ++i) {
        s.x.push_back(est.cycles[i]);
        s.y.push_back(est.leaked_fraction[i]);
    }
    emit(manifest, cfg, "plot.svg",
         io::svg_line_plot("leaked population", "cycle", "fraction", {s}));
    std::printf("estimated L1 = %.4f (low_confidence=%d)\n", fit.l1,
                est.model.low_confidence ? 1 : 0);
    manifest.write();
    return 0;
}

void merge_config_file(RunConfig& cfg, const CLI::App& app) {
    if (cfg.config_file.empty()) return;
    const json j = json::parse(io::read_file(cfg.config_file));
    auto take = [&](const char* flag, const char* key, auto& field) {
        const auto* opt = app.get_option_no_throw(flag);
        const bool passed = opt != nullptr && opt->count() > 0;
        if (!passed && j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    take("--device", "device", cfg.device_file);
    take("--out", "out", cfg.out_dir);
    take("--noise", "noise", cfg.noise_level);
    take("--l1", "l1", cfg.l1);
    take("--scheme", "scheme", cfg.scheme);
    take("--mode", "mode", cfg.mode);
    take("--shots", "shots", cfg.shots);
    take("--seed", "seed", cfg.seed);
    take("--cycles", "cycles", cfg.cycles);
    take("--points", "points", cfg.points);
    take("--theta", "theta", cfg.theta);
    take("--phi", "phi", cfg.phi);
    take("--basis", "basis", cfg.basis);
    take("--gate", "gate", cfg.gate);
    take("--check", "check", cfg.check);
    take("--l1-grid", "l1_grid", cfg.l1_grid);
    take("--input", "input", cfg.input_file);
    take("--calib", "calib", cfg.calib_file);
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"distance-2 surface-code laboratory"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--config", cfg.config_file, "JSON config file; flags override its values");
    app.add_option("--device", cfg.device_file, "device parameter file (JSON)")
        ->capture_default_str();
    app.add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
    app.add_option("--noise", cfg.noise_level, "noise model level 0-5")
        ->check(CLI::Range(0, 5))
        ->capture_default_str();
    app.add_option("--l1", cfg.l1, "leakage per CZ for level 5")
        ->check(CLI::Range(0.0, 0.25))
        ->capture_default_str();
    app.add_option("--scheme", cfg.scheme, "stabilizer schedule: pipelined|parallel")
        ->check(CLI::IsMember({"pipelined", "parallel"}))
        ->capture_default_str();
    app.add_option("--mode", cfg.mode, "exact|sampled")
        ->check(CLI::IsMember({"exact", "sampled"}))
        ->capture_default_str();
    app.add_option("--shots", cfg.shots, "shots for sampled mode")->capture_default_str();
    app.add_option("--seed", cfg.seed, "random seed (mandatory in sampled mode)")
        ->capture_default_str();
    app.add_option("--cycles", cfg.cycles, "detection cycles")->capture_default_str();
    app.add_flag("--serial", cfg.serial, "disable the parallel kernels");

    auto* init = app.add_subcommand("init-suite", "cardinal-state initialization table");
    auto* sweep = app.add_subcommand("measure-sweep", "logical measurement angle sweeps");
    sweep->add_option("--points", cfg.points, "grid points per sweep")->capture_default_str();
    auto* tomo_cmd = app.add_subcommand("gate-tomo", "logical process tomography");
    tomo_cmd->add_option("--gate", cfg.gate, "TL|XL90|XL|ZL|all")->capture_default_str();
    auto* stab = app.add_subcommand("stabilize", "repeated error detection");
    stab->add_option("--theta", cfg.theta, "preparation polar angle")->capture_default_str();
    stab->add_option("--phi", cfg.phi, "preparation azimuthal angle")->capture_default_str();
    stab->add_option("--basis", cfg.basis, "final logical measurement basis Z|X|Y")
        ->capture_default_str();
    auto* cmp = app.add_subcommand("compare-schemes", "pipelined versus parallel rates");
    auto* abl = app.add_subcommand("ablation", "error-model ablation and leakage sweep");
    abl->add_option("--l1-grid", cfg.l1_grid, "leakage values for the level-5 sweep")
        ->capture_default_str();
    auto* fit = app.add_subcommand("fit", "retention decay fit from a CSV");
    fit->add_option("--input", cfg.input_file, "csv with cycle,post_selected_fraction[,shots]");
    auto* zz = app.add_subcommand("calibrate-zz", "Ramsey characterization of CZ phases");
    zz->add_option("--check", cfg.check, "Z13|Z1234|Z24")->capture_default_str();
    auto* leak = app.add_subcommand("leakage-estimate", "triple-Gaussian leakage estimation");
    leak->add_option("--input", cfg.input_file, "csv with cycle,voltage (else synthetic)");
    leak->add_option("--calib", cfg.calib_file, "csv with state,voltage calibration shots");

    CLI11_PARSE(app, argc, argv);

    try {
        merge_config_file(cfg, app);
        if (cfg.serial) kernels::set_backend(kernels::Backend::serial);
        if (cfg.mode == "sampled" && app.get_option("--seed")->count() == 0 &&
            !cfg.config_file.empty())
            throw CLI::ValidationError("sampled mode requires an explicit seed");
        if (init->parsed()) return cmd_init_suite(cfg);
        if (sweep->parsed()) return cmd_measure_sweep(cfg);
        if (tomo_cmd->parsed()) return cmd_gate_tomo(cfg);
        if (stab->parsed()) return cmd_stabilize(cfg);
        if (cmp->parsed()) return cmd_compare_schemes(cfg);
        if (abl->parsed()) return cmd_ablation(cfg);
        if (fit->parsed()) return cmd_fit(cfg);
        if (zz->parsed()) return cmd_calibrate_zz(cfg);
        if (leak->parsed()) return cmd_leakage_estimate(cfg);
    } catch (const CLI::Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
