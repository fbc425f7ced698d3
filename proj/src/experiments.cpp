#include "s7sim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "s7sim/surface7.hpp"

namespace s7sim::expt {

using namespace circuits;
namespace {
constexpr double kPi = 3.14159265358979323846;

std::string logical_op_string(LogicalBasis basis) {
    switch (basis) {
        case LogicalBasis::Z: return "ZZIIIII";
        case LogicalBasis::X: return "XIXIIII";
        default: return "YZXIIII";
    }
}
}  // namespace

DetectionRecord run_detection(const PrepAngles& angles, Scheme scheme, int cycles,
                              const noise::NoiseModel& model, LogicalBasis basis,
                              double echo_axis_phi, bool with_operator_expectations) {
    if (cycles < 1) throw std::invalid_argument("need at least one detection cycle");
    DetectionRecord rec;
    rec.angles = angles;
    rec.scheme = scheme;
    rec.cycles = cycles;
    rec.basis = basis;

    TimedCircuit circuit = build_detection_circuit(angles, scheme, cycles, echo_axis_phi);
    const auto assembly = build_logical_measurement(basis);
    TimedCircuit readout = assembly_circuit(assembly, circuit.total_duration_ns());
    for (auto& ins : readout.instructions)
        if (ins.kind != Kind::measure) circuit.append(std::move(ins));
    circuit.validate();
    rec.wall_clock_ns = circuit.total_duration_ns() + kReadoutNs;

    const exec::Runner runner(model);
    auto run = runner.run(circuit);
    for (int k = 0; k < cycles; ++k) rec.cycle_retention.push_back(run.cycle_retention(k));
    if (run.zero_branch) {
        rec.zero_branch = true;
        return rec;
    }
    const auto stats = exec::evaluate_assembly(*run.state, assembly, model);
    rec.final_syndrome_probability = stats.check_pass_probability;
    rec.retained_fraction = run.branch_probability * stats.check_pass_probability;
    rec.assembly_logical_value = stats.logical_expectation;
    if (with_operator_expectations) {
        // conditioned-state operator expectations need a rerun without the
        // destructive-readout basis rotations
        TimedCircuit plain = build_detection_circuit(angles, scheme, cycles, echo_axis_phi);
        auto run2 = runner.run(plain);
        if (run2.state) {
            rec.op_z = run2.state->expectation(logical_op_string(LogicalBasis::Z));
            rec.op_x = run2.state->expectation(logical_op_string(LogicalBasis::X));
            rec.op_y = run2.state->expectation(logical_op_string(LogicalBasis::Y));
        }
    }
    return rec;
}

SampledDetection sample_detection(const DetectionRecord& record,
                                  const exec::AssemblyStats& stats, long shots,
                                  std::uint64_t seed) {
    SampledDetection out;
    out.shots = shots;
    out.discarded_at_cycle.assign(record.cycles + 1, 0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<std::pair<std::string, double>> strings(stats.string_probs.begin(),
                                                        stats.string_probs.end());
    double string_total = 0.0;
    for (const auto& [k, v] : strings) string_total += v;

    const double prep = 1.0;
    for (long s = 0; s < shots; ++s) {
        bool alive = true;
        (void)prep;
        for (int k = 0; k < record.cycles && alive; ++k) {
            if (unit(rng) >= record.cycle_retention[k]) {
                ++out.discarded_at_cycle[k];
                alive = false;
            }
        }
        if (!alive) continue;
        // final data string
        double draw = unit(rng) * string_total;
        std::size_t pick = 0;
        for (; pick + 1 < strings.size(); ++pick) {
            if (draw < strings[pick].second) break;
            draw -= strings[pick].second;
        }
        const std::string& key = strings[pick].first;
        ++out.final_strings[key];
        // final checks: recompute pass/fail against the record's basis
        const auto assembly = build_logical_measurement(record.basis);
        bool pass = true;
        for (const auto& cs : assembly.check_sets) {
            int parity = 0;
            for (int site : cs) parity ^= key[site] - '0';
            if (parity & 1) pass = false;
        }
        for (char c : key)
            if (c > '1') pass = false;
        if (pass)
            ++out.retained;
        else
            ++out.discarded_at_cycle[record.cycles];
    }
    return out;
}

SampledDetection run_detection_sampled(const PrepAngles& angles, Scheme scheme, int cycles,
                                       const noise::NoiseModel& model, long shots,
                                       std::uint64_t seed, LogicalBasis basis) {
    DetectionRecord rec = run_detection(angles, scheme, cycles, model, basis);
    if (rec.zero_branch) {
        SampledDetection out;
        out.shots = shots;
        out.discarded_at_cycle.assign(cycles + 1, 0);
        out.discarded_at_cycle[0] = shots;
        return out;
    }
    // rebuild the final-string stats for the sampler
    TimedCircuit circuit = build_detection_circuit(angles, scheme, cycles);
    const auto assembly = build_logical_measurement(basis);
    TimedCircuit readout = assembly_circuit(assembly, circuit.total_duration_ns());
    for (auto& ins : readout.instructions)
        if (ins.kind != Kind::measure) circuit.append(std::move(ins));
    const exec::Runner runner(model);
    auto run = runner.run(circuit);
    const auto stats = exec::evaluate_assembly(*run.state, assembly, model);
    return sample_detection(rec, stats, shots, seed);
}

std::vector<cplx> embed_data_state(const std::vector<cplx>& amplitudes,
                                   const QuditRegister& data_reg) {
    if (amplitudes.size() != 16) throw std::invalid_argument("expected a four-qubit state");
    std::vector<cplx> out(data_reg.total_dim(), cplx(0.0, 0.0));
    for (int b = 0; b < 16; ++b) {
        std::vector<int> occ(4);
        for (int s = 0; s < 4; ++s) occ[s] = (b >> (3 - s)) & 1;
        out[data_reg.basis_index(occ)] = amplitudes[b];
    }
    return out;
}

namespace {
struct PreparedState {
    DensityMatrix data;  // reduced to D1..D4
    double retained = 0.0;
};

PreparedState prepare_with_round(const TimedCircuit& prep, Scheme scheme,
                                 const noise::NoiseModel& model) {
    TimedCircuit circuit = prep;
    circuit.cycle_period_ns =
        scheme == Scheme::pipelined ? kPipelinedPeriodNs : kParallelPeriodNs;
    append_cycle(circuit, scheme, 0, kSingleQubitNs);
    circuit.validate();
    const exec::Runner runner(model);
    auto run = runner.run(circuit);
    if (run.zero_branch) throw std::runtime_error("preparation branch vanished");
    return {run.state->partial_trace({0, 1, 2, 3}), run.branch_probability};
}

InitResult characterize_state(const std::string& name, const std::string& variant,
                              const PreparedState& prep, const std::vector<cplx>& target16,
                              double tx, double ty, double tz) {
    InitResult res;
    res.state = name;
    res.variant = variant;
    res.retained = prep.retained;
    res.f4q = prep.data.fidelity_with_pure(embed_data_state(target16, prep.data.reg()));
    auto [qubits, weight] = tomo::qubit_restrict(prep.data);
    (void)weight;
    const auto pv = tomo::measure_pauli_vector(qubits);
    const auto mle = tomo::mle_state(pv);
    const auto logical = surface7::project_to_codespace(mle.state);
    res.fl = surface7::logical_fidelity(logical, tx, ty, tz);
    return res;
}
}  // namespace

std::vector<InitResult> run_cardinal_init_suite(const noise::NoiseModel& model, Scheme scheme) {
    std::vector<InitResult> out;
    struct Spec {
        const char* name;
        const char* variant;
        PrepAngles angles;
        bool ft_product = false;  // use the |+...> product preparation
        bool minus = false;
        double tx, ty, tz;
    };
    const std::vector<Spec> specs = {
        {"0L", "ft", {0.0, 0.0}, false, false, 0, 0, 1},
        {"1L", "ft", {kPi, 0.0}, false, false, 0, 0, -1},
        {"+L", "nonft", {kPi / 2, 0.0}, false, false, 1, 0, 0},
        {"-L", "nonft", {kPi / 2, kPi}, false, false, -1, 0, 0},
        {"+L", "ft", {}, true, false, 1, 0, 0},
        {"-L", "ft", {}, true, true, -1, 0, 0},
    };
    for (const auto& s : specs) {
        const TimedCircuit prep =
            s.ft_product ? build_prep_plus_minus(s.minus) : build_prep(s.angles);
        const PreparedState st = prepare_with_round(prep, scheme, model);
        // Bloch axis to logical amplitudes: cos(a/2)|0_L> + e^{i b} sin(a/2)|1_L>
        const double a = std::acos(std::clamp(s.tz, -1.0, 1.0));
        const double b = std::atan2(s.ty, s.tx);
        const auto target16 = surface7::logical_vector(
            std::cos(a / 2), std::sin(a / 2) * std::exp(cplx(0.0, b)));
        out.push_back(characterize_state(s.name, s.variant, st, target16, s.tx, s.ty, s.tz));
    }
    return out;
}

double SweepResult::flr(double amplitude) const {
    const double denom = 2.0 * mean_fl - 1.0;
    if (std::abs(denom) < 1e-12) return 0.5;
    return 0.5 * (amplitude / denom + 1.0);
}

SweepResult run_logical_measurement_sweep(bool equatorial, int grid_points,
                                          const noise::NoiseModel& model, Scheme scheme) {
    if (grid_points < 3) throw std::invalid_argument("sweep needs at least three points");
    SweepResult res;
    res.equatorial = equatorial;
    res.points.resize(grid_points);

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < grid_points; ++i) {
        const double angle = (equatorial ? 2.0 * kPi : kPi) * i / (grid_points - 1);
        const PrepAngles angles =
            equatorial ? PrepAngles{kPi / 2, angle} : PrepAngles{angle, 0.0};
        SweepPoint pt;
        pt.angle = angle;
        for (LogicalBasis basis : {LogicalBasis::Z, LogicalBasis::X, LogicalBasis::Y}) {
            const auto rec = run_detection(angles, scheme, 1, model, basis);
            const double val = rec.zero_branch ? 0.0 : rec.assembly_logical_value;
            const double p = rec.zero_branch ? 0.0 : rec.retained_fraction;
            switch (basis) {
                case LogicalBasis::Z: pt.zl = val; pt.p_zl = p; break;
                case LogicalBasis::X: pt.xl = val; pt.p_xl = p; break;
                case LogicalBasis::Y: pt.yl = val; pt.p_yl = p; break;
            }
        }
        // logical fidelity of the prepared state against its ideal target
        const TimedCircuit prep = build_prep(angles);
        const PreparedState st = prepare_with_round(prep, scheme, model);
        auto [qubits, weight] = tomo::qubit_restrict(st.data);
        (void)weight;
        const auto logical =
            surface7::project_to_codespace(tomo::mle_state(tomo::measure_pauli_vector(qubits)).state);
        const double ct = std::cos(angle), stn = std::sin(angle);
        if (equatorial)
            pt.fl = surface7::logical_fidelity(logical, ct, stn, 0.0);
        else {
            // ideal polar state has Bloch (sin^2 / norm, 0, cos / norm)
            const double c2 = std::cos(angle / 2) * std::cos(angle / 2);
            const double s2 = 1.0 - c2;
            const double norm = c2 * c2 + s2 * s2;
            pt.fl = surface7::logical_fidelity(logical, 2.0 * c2 * s2 / norm, 0.0,
                                               (c2 * c2 - s2 * s2) / norm);
        }
        res.points[i] = pt;
    }

    double fl_sum = 0.0;
    for (const auto& pt : res.points) fl_sum += pt.fl;
    res.mean_fl = fl_sum / res.points.size();

    // scaled fit of the ideal angular dependence; the scale is max|<O_L>|
    auto scaled_fit = [&](auto value, auto ideal) {
        double num = 0.0, den = 0.0;
        for (const auto& pt : res.points) {
            const double f = ideal(pt.angle);
            num += f * value(pt);
            den += f * f;
        }
        return den > 1e-12 ? std::abs(num / den) : 0.0;
    };
    if (equatorial) {
        res.amp_xl = scaled_fit([](const SweepPoint& p) { return p.xl; },
                                [](double a) { return std::cos(a); });
        res.amp_yl = scaled_fit([](const SweepPoint& p) { return p.yl; },
                                [](double a) { return std::sin(a); });
        res.amp_zl = 0.0;
    } else {
        auto ideal_z = [](double a) {
            const double c2 = std::cos(a / 2) * std::cos(a / 2);
            const double s2 = 1.0 - c2;
            return (c2 * c2 - s2 * s2) / (c2 * c2 + s2 * s2);
        };
        auto ideal_x = [](double a) {
            const double c2 = std::cos(a / 2) * std::cos(a / 2);
            const double s2 = 1.0 - c2;
            return 2.0 * c2 * s2 / (c2 * c2 + s2 * s2);
        };
        res.amp_zl = scaled_fit([](const SweepPoint& p) { return p.zl; }, ideal_z);
        res.amp_xl = scaled_fit([](const SweepPoint& p) { return p.xl; }, ideal_x);
        res.amp_yl = 0.0;
    }
    return res;
}

SchemeComparison compare_schemes(int n_max, const noise::NoiseModel& model) {
    if (n_max < 5) throw std::invalid_argument("need at least five cycles to fit a rate");
    SchemeComparison cmp;
    struct Input {
        const char* name;
        PrepAngles angles;
        LogicalBasis basis;
    };
    const std::vector<Input> inputs = {
        {"0L", {0.0, 0.0}, LogicalBasis::Z},
        {"1L", {kPi, 0.0}, LogicalBasis::Z},
        {"+L", {kPi / 2, 0.0}, LogicalBasis::X},
        {"-L", {kPi / 2, kPi}, LogicalBasis::X},
    };
    double ratio_sum = 0.0;
    for (const auto& in : inputs) {
        SchemeComparison::Entry entry;
        entry.state = in.name;
        double gammas[2] = {0.0, 0.0};
        for (Scheme scheme : {Scheme::pipelined, Scheme::parallel}) {
            std::vector<double> ns, ps;
            std::vector<DetectionRecord> recs(n_max);
#pragma omp parallel for schedule(dynamic)
            for (int n = 1; n <= n_max; ++n)
                recs[n - 1] = run_detection(in.angles, scheme, n, model, in.basis, 0.0, false);
            for (int n = 1; n <= n_max; ++n) {
                if (recs[n - 1].zero_branch) continue;
                ns.push_back(n);
                ps.push_back(recs[n - 1].retained_fraction);
            }
            const auto fit = calib::fit_detection_rate(ns, ps);
            gammas[scheme == Scheme::parallel] = fit.gamma;
            cmp.records[std::string(in.name) + "/" + to_string(scheme)] = std::move(recs);
        }
        entry.gamma_pipelined = gammas[0];
        entry.gamma_parallel = gammas[1];
        entry.ratio = gammas[1] > 0.0 ? gammas[0] / gammas[1] : 1.0;
        ratio_sum += entry.ratio;
        cmp.entries.push_back(entry);
    }
    cmp.average_ratio = ratio_sum / cmp.entries.size();
    return cmp;
}

AblationResult run_model_ablation(const noise::DeviceParams& device,
                                  const std::vector<double>& l1_grid, int n_max,
                                  Scheme scheme) {
    AblationResult out;
    const PrepAngles zero{0.0, 0.0};
    auto sweep = [&](const noise::NoiseModel& model) {
        AblationResult::Curve curve;
        curve.level = model.level;
        curve.l1 = model.l1;
        std::vector<DetectionRecord> recs(n_max);
#pragma omp parallel for schedule(dynamic)
        for (int n = 1; n <= n_max; ++n)
            recs[n - 1] = run_detection(zero, scheme, n, model, LogicalBasis::Z, 0.0, false);
        for (int n = 1; n <= n_max; ++n) {
            if (recs[n - 1].zero_branch) continue;
            curve.cycles.push_back(n);
            curve.retained.push_back(recs[n - 1].retained_fraction);
        }
        curve.fit = calib::fit_detection_rate(curve.cycles, curve.retained);
        return curve;
    };
    for (int level = 0; level <= 4; ++level)
        out.model_curves.push_back(sweep(noise::NoiseModel::make(level, device)));
    for (double l1 : l1_grid)
        out.l1_curves.push_back(sweep(noise::NoiseModel::make(5, device, l1)));
    return out;
}

}  // namespace s7sim::expt
