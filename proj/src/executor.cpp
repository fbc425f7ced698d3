#include "s7sim/executor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "s7sim/gates.hpp"
#include "s7sim/surface7.hpp"

namespace s7sim::exec {

using circuits::Kind;
using circuits::TimedInstruction;

double RunResult::cycle_retention(int cycle_index) const {
    double p = 1.0;
    for (const auto& ev : events)
        if (ev.cycle_index == cycle_index) p *= ev.probability;
    return p;
}

Runner::Runner(const noise::NoiseModel& model)
    : Runner(model, model.register_dims()) {}

Runner::Runner(const noise::NoiseModel& model, std::vector<int> dims)
    : model_(model), reg_(std::move(dims), surface7::kAllLabels) {
    if (reg_.num_sites() != 7) throw std::invalid_argument("expected a seven-site register");
}

DensityMatrix Runner::initial_state() const {
    DensityMatrix dm(reg_, std::vector<int>(7, 0));
    for (int s = 0; s < 7; ++s) {
        const double pe = model_.residual_excitation(s);
        if (pe <= 0.0) continue;
        KrausChannel mix;
        mix.sites = {s};
        const int d = reg_.dim_of(s);
        std::vector<cplx> stay(static_cast<std::size_t>(d) * d, cplx(0.0, 0.0));
        std::vector<cplx> flip(static_cast<std::size_t>(d) * d, cplx(0.0, 0.0));
        for (int i = 0; i < d; ++i) stay[i * d + i] = std::sqrt(1.0 - pe);
        flip[0 * d + 1] = std::sqrt(pe);
        flip[1 * d + 0] = std::sqrt(pe);
        if (d > 2) flip[2 * d + 2] = std::sqrt(pe);
        mix.operators = {std::move(stay), std::move(flip)};
        dm.apply_kraus(mix);
    }
    return dm;
}

kernels::Superop Runner::idle_superop(int site, double dt_ns, double dephasing_rate) const {
    const int d = reg_.dim_of(site);
    if (dt_ns <= 0.0 || !model_.with_decoherence()) return kernels::superop_identity(d);
    const double dt = dt_ns * 1e-9;
    auto s = kernels::superop_from_ops(
        noise::amplitude_damping(model_.relaxation_time(site), dt, d, site).operators, d);
    if (dephasing_rate > 0.0)
        s = kernels::compose(
            kernels::superop_from_ops(
                noise::phase_damping(1.0 / dephasing_rate, dt, d, site).operators, d),
            s);
    return s;
}

void Runner::apply_idle(DensityMatrix& dm, int site, double dt_ns, double dephasing_rate) const {
    if (dt_ns <= 0.0 || !model_.with_decoherence()) return;
    dm.apply_superop(idle_superop(site, dt_ns, dephasing_rate), {site});
}

RunResult Runner::run(const circuits::TimedCircuit& circuit, const RunOptions& opt) const {
    return run(circuit, initial_state(), opt);
}

RunResult Runner::run(const circuits::TimedCircuit& circuit, DensityMatrix state,
                      const RunOptions& opt) const {
    RunResult res;
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<std::size_t> order(circuit.instructions.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return circuit.instructions[a].t_start_ns < circuit.instructions[b].t_start_ns;
    });

    std::vector<double> last_free(7, 0.0);
    auto site_of = [&](const std::string& label) { return reg_.site_index(label); };
    auto fill_idle = [&](int site, double until) {
        if (until > last_free[site]) {
            apply_idle(state, site, until - last_free[site],
                       model_.dephasing_rate(site, false, false));
            last_free[site] = until;
        }
    };

    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const std::size_t idx = order[oi];
        const TimedInstruction& ins = circuit.instructions[idx];
        std::vector<int> sites;
        for (const auto& l : ins.sites) sites.push_back(site_of(l));
        for (int s : sites) fill_idle(s, ins.t_start_ns);

        switch (ins.kind) {
            case Kind::rotation: {
                for (int s : sites) {
                    const auto u = gates::rphi(ins.theta, ins.phi, reg_.dim_of(s));
                    if (!model_.with_decoherence()) {
                        state.apply_unitary(u, {s});
                        continue;
                    }
                    // half-gate noise and the pulse fused into one sweep
                    const auto half =
                        idle_superop(s, ins.duration_ns / 2, model_.dephasing_rate(s, false, false));
                    state.apply_superop(
                        kernels::compose(
                            half, kernels::compose(
                                      kernels::superop_from_ops({u}, reg_.dim_of(s)), half)),
                        {s});
                }
                break;
            }
            case Kind::cz: {
                const int anc = sites[0], dat = sites[1];
                const int fluxed = site_of(ins.fluxed_site);
                const auto phases = model_.cz_dressing(ins.sites[0], ins.sites[1]);
                double l1 = model_.with_leakage() ? model_.l1 : 0.0;
                if (auto it = opt.cz_l1_override.find(idx); it != opt.cz_l1_override.end())
                    l1 = it->second;
                const int da = reg_.dim_of(anc), dd = reg_.dim_of(dat);
                const auto u = l1 > 0.0
                                   ? gates::cz_with_leakage(l1, ins.leak_swap_first, da, dd,
                                                            phases[0], phases[1], phases[2])
                                   : gates::cz_phases(phases[0], phases[1], phases[2], da, dd);
                if (!model_.with_decoherence()) {
                    if (l1 > 0.0) {
                        state.apply_unitary(u, {anc, dat});
                    } else {
                        std::vector<cplx> diag(static_cast<std::size_t>(da) * dd);
                        for (std::size_t i = 0; i < diag.size(); ++i)
                            diag[i] = u[i * diag.size() + i];
                        state.apply_phase_diagonal(diag, {anc, dat});
                    }
                    break;
                }
                auto rate = [&](int s) { return model_.dephasing_rate(s, s == fluxed, false); };
                const auto half =
                    kernels::tensor(idle_superop(anc, ins.duration_ns / 2, rate(anc)),
                                    idle_superop(dat, ins.duration_ns / 2, rate(dat)));
                state.apply_superop(
                    kernels::compose(
                        half, kernels::compose(
                                  kernels::superop_from_ops({u}, static_cast<std::size_t>(da) * dd),
                                  half)),
                    {anc, dat});
                break;
            }
            case Kind::park: {
                for (int s : sites)
                    apply_idle(state, s, ins.duration_ns, model_.dephasing_rate(s, false, true));
                break;
            }
            case Kind::idle: {
                for (int s : sites)
                    apply_idle(state, s, ins.duration_ns, model_.dephasing_rate(s, false, false));
                break;
            }
            case Kind::measure: {
                const int s = sites[0];
                const Povm povm = model_.readout_povm(s, reg_.dim_of(s));
                MeasurementEvent ev;
                ev.site = ins.sites[0];
                ev.cycle_index = ins.cycle_index;
                if (opt.mode == RunOptions::Mode::sampled) {
                    const auto probs = state.outcome_probabilities(s, povm);
                    double total = std::accumulate(probs.begin(), probs.end(), 0.0);
                    double draw = unit(rng) * total;
                    std::size_t pick = 0;
                    for (; pick + 1 < probs.size(); ++pick) {
                        if (draw < probs[pick]) break;
                        draw -= probs[pick];
                    }
                    auto m = state.measure_condition(s, povm[pick].outcome, povm);
                    ev.declared = povm[pick].outcome;
                    ev.probability = probs[pick] / total;
                    if (!m.state) {
                        res.zero_branch = true;
                        res.events.push_back(ev);
                        return res;
                    }
                    state = std::move(*m.state);
                } else {
                    if (ins.condition_outcome < 0)
                        throw std::logic_error(
                            "recorded measurements are evaluated via evaluate_assembly");
                    const int want = ins.condition_outcome;
                    auto m = state.measure_condition(s, want, povm);
                    ev.declared = want;
                    ev.probability = m.probability;
                    res.branch_probability *= m.probability;
                    if (!m.state) {
                        res.zero_branch = true;
                        res.events.push_back(ev);
                        return res;
                    }
                    state = std::move(*m.state);
                }
                res.events.push_back(ev);
                break;
            }
        }
        // readout windows only block the site; decay accrues as idle time
        const double busy_until =
            ins.kind == Kind::measure ? ins.t_start_ns : ins.t_end_ns();
        for (int s : sites) last_free[s] = std::max(last_free[s], busy_until);

        for (const auto& f : opt.faults) {
            if (f.instruction_index != idx) continue;
            const int s = site_of(f.site);
            state.apply_unitary(fault_unitary(f.pauli, reg_.dim_of(s)), {s});
        }
    }
    const double end = circuit.total_duration_ns();
    for (int s = 0; s < 7; ++s) fill_idle(s, end);
    res.state = std::move(state);
    return res;
}

AssemblyStats evaluate_assembly(const DensityMatrix& state,
                                const circuits::MeasurementAssembly& assembly,
                                const noise::NoiseModel& model) {
    const auto& reg = state.reg();
    const std::size_t dim = reg.total_dim();

    // declared-outcome probabilities per data site and level
    std::array<std::vector<std::vector<double>>, 4> declare;  // [site][outcome][level]
    std::array<std::vector<int>, 4> outcomes;
    for (int i = 0; i < 4; ++i) {
        const int s = reg.site_index(surface7::kDataLabels[i]);
        const int d = reg.dim_of(s);
        const Povm povm = model.readout_povm(s, d);
        for (const auto& el : povm) {
            outcomes[i].push_back(el.outcome);
            std::vector<double> p(d);
            for (int lv = 0; lv < d; ++lv) p[lv] = el.diag[lv] * el.diag[lv];
            declare[i].push_back(std::move(p));
        }
    }

    AssemblyStats stats;
    double pass = 0.0, value_acc = 0.0;
    std::vector<std::size_t> counts;
    for (int i = 0; i < 4; ++i) counts.push_back(outcomes[i].size());
    std::vector<std::size_t> sidx(4, 0);
    while (true) {
        std::string key;
        bool leaked_declared = false;
        for (int i = 0; i < 4; ++i) {
            const int o = outcomes[i][sidx[i]];
            key += static_cast<char>('0' + o);
            leaked_declared |= o > 1;
        }
        double prob = 0.0;
        for (std::size_t b = 0; b < dim; ++b) {
            double w = state.at(b, b).real();
            if (w == 0.0) continue;
            for (int i = 0; i < 4; ++i) {
                const int s = reg.site_index(surface7::kDataLabels[i]);
                w *= declare[i][sidx[i]][reg.level_at(b, s)];
            }
            prob += w;
        }
        stats.string_probs[key] = prob;

        bool checks_ok = !leaked_declared;
        if (checks_ok) {
            for (const auto& cs : assembly.check_sets) {
                int parity = 0;
                for (int s : cs) parity ^= outcomes[s][sidx[s]];
                if (parity & 1) {
                    checks_ok = false;
                    break;
                }
            }
        }
        if (checks_ok) {
            int parity = 0;
            for (int s : assembly.value_sites) parity ^= outcomes[s][sidx[s]];
            pass += prob;
            value_acc += prob * (parity & 1 ? -1.0 : 1.0);
        }

        int k = 3;
        for (; k >= 0; --k) {
            if (++sidx[k] < counts[k]) break;
            sidx[k] = 0;
        }
        if (k < 0) break;
    }
    stats.check_pass_probability = pass;
    stats.logical_expectation = pass > 0.0 ? value_acc / pass : 0.0;
    return stats;
}

std::vector<cplx> fault_unitary(char pauli, int dim) {
    std::vector<cplx> u(static_cast<std::size_t>(dim) * dim, cplx(0.0, 0.0));
    if (dim > 2) u[2 * dim + 2] = 1.0;
    switch (pauli) {
        case 'X':
            u[0 * dim + 1] = 1.0;
            u[1 * dim + 0] = 1.0;
            break;
        case 'Y':
            u[0 * dim + 1] = cplx(0.0, -1.0);
            u[1 * dim + 0] = cplx(0.0, 1.0);
            break;
        case 'Z':
            u[0 * dim + 0] = 1.0;
            u[1 * dim + 1] = -1.0;
            break;
        default:
            throw std::invalid_argument("fault must be X, Y or Z");
    }
    return u;
}

}  // namespace s7sim::exec
