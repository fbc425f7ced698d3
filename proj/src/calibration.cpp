#include "s7sim/calibration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "s7sim/executor.hpp"
#include "s7sim/gates.hpp"
#include "s7sim/surface7.hpp"

namespace s7sim::calib {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double wrap_to_2pi(double x) {
    x = std::fmod(x, kTwoPi);
    return x < 0.0 ? x + kTwoPi : x;
}

double wrap_to_pi(double x) {
    x = std::fmod(x + kPi, kTwoPi);
    if (x < 0.0) x += kTwoPi;
    return x - kPi;
}
}  // namespace

DecayFit fit_detection_rate(const std::vector<double>& cycles, const std::vector<double>& retained,
                            const std::vector<double>& shots) {
    if (cycles.size() != retained.size() || cycles.size() < 3)
        throw std::invalid_argument("need at least three retention points");
    for (double p : retained)
        if (p <= 0.0 || p > 1.0)
            throw std::invalid_argument("retained fractions must be in (0, 1]");
    std::vector<double> w(cycles.size(), 1.0);
    if (!shots.empty()) {
        if (shots.size() != cycles.size())
            throw std::invalid_argument("shot-count vector length mismatch");
        w = shots;
    }
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        const double y = std::log(retained[i]);
        sw += w[i];
        sx += w[i] * cycles[i];
        sy += w[i] * y;
        sxx += w[i] * cycles[i] * cycles[i];
        sxy += w[i] * cycles[i] * y;
    }
    const double det = sw * sxx - sx * sx;
    if (std::abs(det) < 1e-30) throw std::invalid_argument("degenerate cycle axis");
    const double slope = (sw * sxy - sx * sy) / det;
    const double intercept = (sy * sxx - sx * sxy) / det;
    DecayFit fit;
    fit.gamma = std::clamp(1.0 - std::exp(slope), 0.0, 1.0);
    fit.amplitude = std::exp(intercept);
    double ss = 0.0;
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        const double r = std::log(retained[i]) - (intercept + slope * cycles[i]);
        ss += w[i] * r * r;
    }
    fit.residual = std::sqrt(ss / sw);
    return fit;
}

ParityBenchmark parity_benchmark(circuits::Check check, const noise::NoiseModel& model) {
    using namespace circuits;
    ParityBenchmark bench;
    std::vector<std::string> data = check_data_sites(check);
    std::sort(data.begin(), data.end());
    const std::string anc = check_ancilla(check);
    const exec::Runner runner(model);
    const int n = static_cast<int>(data.size());

    double total = 0.0;
    for (int x = 0; x < (1 << n); ++x) {
        TimedCircuit c;
        c.site_labels = surface7::kAllLabels;
        std::string key(n, '0');
        int parity = 0;
        for (int i = 0; i < n; ++i) {
            const bool one = (x >> (n - 1 - i)) & 1;
            if (one) {
                key[i] = '1';
                parity ^= 1;
                c.append([&] {
                    TimedInstruction ins;
                    ins.kind = Kind::rotation;
                    ins.sites = {data[i]};
                    ins.t_start_ns = 0.0;
                    ins.duration_ns = kSingleQubitNs;
                    ins.theta = kPi;
                    ins.phi = kPi / 2;  // X pulse
                    return ins;
                }());
            }
        }
        CheckBlockOptions opt;
        opt.t0 = kSingleQubitNs;
        opt.measure = false;  // we need the full outcome distribution
        TimedCircuit block = build_parity_check(check, opt);
        for (auto& ins : block.instructions) c.append(std::move(ins));
        c.validate();
        auto run = runner.run(c);
        const int anc_site = run.state->reg().site_index(anc);
        const auto povm = model.readout_povm(anc_site, run.state->reg().dim_of(anc_site));
        const auto probs = run.state->outcome_probabilities(anc_site, povm);
        double p_one = 0.0, p_zero = 0.0;
        for (std::size_t k = 0; k < povm.size(); ++k)
            (povm[k].outcome == 0 ? p_zero : p_one) += probs[k];
        bench.p_declared_one[key] = p_one;
        total += parity ? p_one : p_zero;
    }
    bench.average_fidelity = total / (1 << n);
    return bench;
}

RamseySystem make_ramsey_system(circuits::Check check) {
    using namespace circuits;
    RamseySystem sys;
    sys.check = check;
    const auto data = check_data_sites(check);  // CZ order
    const int ncz = static_cast<int>(data.size());
    const int k = ncz + 1;
    sys.num_transmons = k;
    sys.unknown_names.push_back("phi_" + check_ancilla(check));
    for (const auto& d : data) sys.unknown_names.push_back("phi_" + d);
    for (const auto& d : data) sys.unknown_names.push_back("cond_" + check_ancilla(check) + d);
    const int nunk = 2 * k - 1;

    // target 0 = ancilla, targets 1..ncz = data qubits in CZ order
    for (int target = 0; target < k; ++target) {
        for (int l = 0; l < (1 << (k - 1)); ++l) {
            std::vector<double> row(nunk, 0.0);
            // bit b of l = state of the b-th non-target transmon, in the order
            // (ancilla first unless it is the target, then data by CZ order)
            std::vector<int> others;
            if (target != 0) others.push_back(0);
            for (int d = 1; d < k; ++d)
                if (d != target) others.push_back(d);
            auto bit_of = [&](int transmon) {
                for (std::size_t b = 0; b < others.size(); ++b)
                    if (others[b] == transmon)
                        return (l >> (others.size() - 1 - b)) & 1;
                return 0;
            };
            if (target == 0) {
                row[0] = 1.0;  // total ancilla phase
                for (int g = 0; g < ncz; ++g)
                    if (bit_of(g + 1)) row[1 + ncz + g] = 1.0;
            } else {
                const int g = target - 1;
                row[1 + g] = 1.0;
                if (bit_of(0)) row[1 + ncz + g] = 1.0;
            }
            sys.design.push_back(std::move(row));
        }
    }
    return sys;
}

RamseySystem generate_ramsey_phases(circuits::Check check, const noise::NoiseModel& model,
                                    int analysis_points) {
    using namespace circuits;
    RamseySystem sys = make_ramsey_system(check);
    const auto data = check_data_sites(check);
    const int ncz = static_cast<int>(data.size());
    const int k = ncz + 1;
    std::vector<std::string> transmons = {check_ancilla(check)};
    transmons.insert(transmons.end(), data.begin(), data.end());

    const exec::Runner runner(model);
    std::size_t row_idx = 0;
    for (int target = 0; target < k; ++target) {
        std::vector<int> others;
        for (int t = 0; t < k; ++t)
            if (t != target) others.push_back(t);
        for (int l = 0; l < (1 << (k - 1)); ++l, ++row_idx) {
            // base circuit: superposition on the target, X pulses on the
            // excited spectators, then the CZ dance of the check
            TimedCircuit base;
            base.site_labels = surface7::kAllLabels;
            TimedInstruction prep;
            prep.kind = Kind::rotation;
            prep.sites = {transmons[target]};
            prep.t_start_ns = 0.0;
            prep.duration_ns = kSingleQubitNs;
            prep.theta = -kPi / 2;
            prep.phi = -kPi / 2;  // R_x^{-pi/2}
            base.append(prep);
            for (std::size_t b = 0; b < others.size(); ++b) {
                if (!((l >> (others.size() - 1 - b)) & 1)) continue;
                TimedInstruction xp;
                xp.kind = Kind::rotation;
                xp.sites = {transmons[others[b]]};
                xp.t_start_ns = 0.0;
                xp.duration_ns = kSingleQubitNs;
                xp.theta = kPi;
                xp.phi = kPi / 2;
                base.append(xp);
            }
            TimedCircuit block = build_check_cz_block(check, kSingleQubitNs);
            for (auto& ins : block.instructions) base.append(std::move(ins));
            base.validate();
            const double block_end = base.total_duration_ns();
            auto run = runner.run(base);

            const int tsite = run.state->reg().site_index(transmons[target]);
            const auto povm = model.readout_povm(tsite, run.state->reg().dim_of(tsite));
            double c0 = 0.0, c1 = 0.0, c2 = 0.0;
            for (int a = 0; a < analysis_points; ++a) {
                const double phi_an = kTwoPi * a / analysis_points;
                DensityMatrix probe = *run.state;
                // analysis pulse and idle-free readout of the target
                probe.apply_unitary(
                    gates::rphi(-kPi / 2, phi_an, probe.reg().dim_of(tsite)), {tsite});
                (void)block_end;
                const auto probs = probe.outcome_probabilities(tsite, povm);
                double p0 = 0.0;
                for (std::size_t q = 0; q < povm.size(); ++q)
                    if (povm[q].outcome == 0) p0 += probs[q];
                c0 += p0;
                c1 += p0 * std::cos(phi_an);
                c2 += p0 * std::sin(phi_an);
            }
            c1 *= 2.0 / analysis_points;
            c2 *= 2.0 / analysis_points;
            // P0(phi_an) = 1/2 (1 - V sin(alpha - phi_an)) for accumulated
            // phase alpha on the target's |1>
            sys.phases.push_back(wrap_to_2pi(std::atan2(-c1, c2)));
        }
    }
    return sys;
}

CzPhaseSolution solve_cz_phases(const RamseySystem& system) {
    const std::size_t rows = system.design.size();
    if (rows == 0 || rows != system.phases.size())
        throw std::invalid_argument("inconsistent system dimensions");
    const std::size_t cols = system.design[0].size();
    Eigen::MatrixXd a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (system.design[i].size() != cols)
            throw std::invalid_argument("ragged design matrix");
        for (std::size_t j = 0; j < cols; ++j) a(i, j) = system.design[i][j];
    }

    CzPhaseSolution sol;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues().maxCoeff();
    for (int j = 0; j < svd.singularValues().size(); ++j) {
        if (svd.singularValues()(j) < 1e-10 * smax) {
            sol.rank_deficient = true;
            std::vector<double> basis(cols);
            for (std::size_t i = 0; i < cols; ++i) basis[i] = svd.matrixV()(i, j);
            sol.nullspace.push_back(std::move(basis));
        }
    }

    Eigen::VectorXd b(rows);
    for (std::size_t i = 0; i < rows; ++i) b(i) = system.phases[i];

    // The data are circular, so the 2pi branch of each row must be chosen
    // consistently. Seed the solve by propagating through rows with a single
    // unresolved unknown; the 0/1 design of the check systems resolves every
    // phase this way.
    Eigen::VectorXd x = Eigen::VectorXd::Constant(cols, kPi);
    {
        std::vector<bool> resolved(cols, false);
        Eigen::VectorXd guess = Eigen::VectorXd::Zero(cols);
        bool progress = true;
        while (progress) {
            progress = false;
            for (std::size_t i = 0; i < rows; ++i) {
                int open = -1, count = 0;
                double acc = 0.0;
                for (std::size_t j = 0; j < cols; ++j) {
                    if (a(i, j) == 0.0) continue;
                    if (resolved[j])
                        acc += a(i, j) * guess(j);
                    else {
                        ++count;
                        open = static_cast<int>(j);
                    }
                }
                if (count == 1) {
                    guess(open) = wrap_to_2pi(b(i) - acc);
                    resolved[open] = true;
                    progress = true;
                }
            }
        }
        if (std::all_of(resolved.begin(), resolved.end(), [](bool r) { return r; })) x = guess;
    }

    // Outer loop re-branches each row of the circular data; inner loop is
    // projected coordinate descent on the box [0, 2pi).
    for (int outer = 0; outer < 8; ++outer) {
        Eigen::VectorXd badj = b;
        for (std::size_t i = 0; i < rows; ++i) {
            const double fit = a.row(i).dot(x);
            badj(i) = fit + wrap_to_pi(b(i) - fit);
        }
        for (int sweep = 0; sweep < 2000; ++sweep) {
            double delta = 0.0;
            for (std::size_t j = 0; j < cols; ++j) {
                const double denom = a.col(j).squaredNorm();
                if (denom < 1e-12) continue;
                const double resid = (badj - a * x).dot(a.col(j));
                double next = std::clamp(x(j) + resid / denom, 0.0, kTwoPi - 1e-12);
                delta = std::max(delta, std::abs(next - x(j)));
                x(j) = next;
            }
            if (delta < 1e-12) break;
        }
    }

    sol.values.resize(cols);
    for (std::size_t j = 0; j < cols; ++j) sol.values[j] = wrap_to_2pi(x(j));
    double ss = 0.0;
    for (std::size_t i = 0; i < rows; ++i) ss += std::pow(wrap_to_pi(a.row(i).dot(x) - b(i)), 2);
    sol.residual = std::sqrt(ss / rows);
    return sol;
}

std::map<std::string, std::array<double, 3>> CzPhaseSolution::to_phase_table(
    circuits::Check check) const {
    using namespace circuits;
    const auto data = check_data_sites(check);
    const int ncz = static_cast<int>(data.size());
    if (values.size() != static_cast<std::size_t>(2 * ncz + 1))
        throw std::invalid_argument("solution size does not match check");
    std::map<std::string, std::array<double, 3>> table;
    for (int g = 0; g < ncz; ++g) {
        const double p10 = g == 0 ? values[0] : 0.0;  // ancilla phase gauge
        const double p01 = values[1 + g];
        const double p11 = wrap_to_2pi(p10 + p01 + values[1 + ncz + g]);
        table[check_ancilla(check) + "-" + data[g]] = {p01, p10, p11};
    }
    return table;
}

namespace {
double gauss_pdf(double x, double mean, double sigma) {
    const double z = (x - mean) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(kTwoPi));
}
}  // namespace

LeakageEstimate estimate_leakage(const std::map<int, std::vector<double>>& shots_per_cycle,
                                 const std::array<std::vector<double>, 3>& calibration_shots) {
    for (const auto& [cycle, shots] : shots_per_cycle)
        if (shots.size() < 1000)
            throw std::invalid_argument("need at least 1000 shots per cycle point");

    // initialize components from the per-state calibration shots
    VoltageModel model;
    std::vector<double> pooled;
    for (int s = 0; s < 3; ++s) {
        const auto& cal = calibration_shots[s];
        if (cal.empty()) throw std::invalid_argument("calibration shots missing for a state");
        const double mean = std::accumulate(cal.begin(), cal.end(), 0.0) / cal.size();
        double var = 0.0;
        for (double v : cal) var += (v - mean) * (v - mean);
        var /= std::max<std::size_t>(cal.size() - 1, 1);
        model.components[s] = {mean, std::sqrt(std::max(var, 1e-12)), 1.0 / 3};
        pooled.insert(pooled.end(), cal.begin(), cal.end());
    }
    for (const auto& [cycle, shots] : shots_per_cycle)
        pooled.insert(pooled.end(), shots.begin(), shots.end());

    // EM on the pooled voltages
    std::array<GaussComponent, 3> comp = model.components;
    double prev_ll = -1e300;
    for (int it = 0; it < 500; ++it) {
        std::array<double, 3> wsum{};
        std::array<double, 3> musum{};
        std::array<double, 3> varsum{};
        double ll = 0.0;
        for (double v : pooled) {
            std::array<double, 3> r{};
            double norm = 0.0;
            for (int c = 0; c < 3; ++c) {
                r[c] = comp[c].weight * gauss_pdf(v, comp[c].mean, comp[c].sigma);
                norm += r[c];
            }
            if (norm <= 0.0) continue;
            ll += std::log(norm);
            for (int c = 0; c < 3; ++c) {
                r[c] /= norm;
                wsum[c] += r[c];
                musum[c] += r[c] * v;
            }
            for (int c = 0; c < 3; ++c)
                varsum[c] += r[c] * (v - comp[c].mean) * (v - comp[c].mean);
        }
        for (int c = 0; c < 3; ++c) {
            if (wsum[c] < 1e-9) {
                model.degenerate = true;
                continue;
            }
            comp[c].weight = wsum[c] / pooled.size();
            comp[c].mean = musum[c] / wsum[c];
            comp[c].sigma = std::sqrt(std::max(varsum[c] / wsum[c], 1e-12));
        }
        if (std::abs(ll - prev_ll) < 1e-9 * pooled.size()) break;
        prev_ll = ll;
    }
    model.components = comp;

    // |2> vs {|0>,|1>} threshold: maximize balanced discrimination from the
    // fitted class densities
    const auto& c2 = comp[2];
    auto class01 = [&](double t) {
        // P(v < t | class {0,1}) with the two components as one class
        const double w = comp[0].weight + comp[1].weight;
        double acc = 0.0;
        for (int c = 0; c < 2; ++c)
            acc += comp[c].weight * 0.5 *
                   (1.0 + std::erf((t - comp[c].mean) / (comp[c].sigma * std::sqrt(2.0))));
        return w > 0 ? acc / w : 0.0;
    };
    const bool two_above = c2.mean >= std::max(comp[0].mean, comp[1].mean);
    auto discrimination = [&](double t) {
        const double p2 = 0.5 * (1.0 + std::erf((t - c2.mean) / (c2.sigma * std::sqrt(2.0))));
        const double keep2 = two_above ? 1.0 - p2 : p2;
        const double keep01 = two_above ? class01(t) : 1.0 - class01(t);
        return 0.5 * (keep2 + keep01);
    };
    double lo = std::min({comp[0].mean, comp[1].mean, c2.mean});
    double hi = std::max({comp[0].mean, comp[1].mean, c2.mean});
    double best_t = lo, best_v = -1.0;
    for (int i = 0; i <= 4000; ++i) {
        const double t = lo + (hi - lo) * i / 4000.0;
        const double v = discrimination(t);
        if (v > best_v) {
            best_v = v;
            best_t = t;
        }
    }
    model.threshold = best_t;
    const double sep = std::abs(c2.mean - comp[1].mean) /
                       std::sqrt(0.5 * (c2.sigma * c2.sigma + comp[1].sigma * comp[1].sigma));
    model.low_confidence = sep < 2.0;

    LeakageEstimate est;
    est.model = model;
    for (const auto& [cycle, shots] : shots_per_cycle) {
        std::size_t leaked = 0;
        for (double v : shots)
            if (two_above ? v > best_t : v < best_t) ++leaked;
        est.cycles.push_back(cycle);
        est.leaked_fraction.push_back(static_cast<double>(leaked) / shots.size());
    }
    return est;
}

std::vector<double> markov_leakage_series(const std::vector<int>& cycles, double l1,
                                          int cz_per_cycle, double t_cycle_s, double t1_s) {
    const double r_up = std::min(cz_per_cycle * 4.0 * l1, 1.0);
    const double r_down = 1.0 - std::exp(-t_cycle_s / (t1_s / 2.0));
    std::vector<double> out;
    const int n_max = cycles.empty() ? 0 : *std::max_element(cycles.begin(), cycles.end());
    std::vector<double> p(n_max + 1, 0.0);
    for (int n = 1; n <= n_max; ++n)
        p[n] = p[n - 1] * (1.0 - r_down) * (1.0 - r_up) + (1.0 - p[n - 1]) * r_up;
    for (int c : cycles) out.push_back(p[c]);
    return out;
}

L1Fit estimate_l1_markov(const std::vector<int>& cycles, const std::vector<double>& leaked,
                         int cz_per_cycle, double t_cycle_s, double t1_s) {
    if (cycles.size() != leaked.size() || cycles.empty())
        throw std::invalid_argument("series length mismatch");
    L1Fit fit;
    const double spread =
        *std::max_element(leaked.begin(), leaked.end()) -
        *std::min_element(leaked.begin(), leaked.end());
    const double level = *std::max_element(leaked.begin(), leaked.end());
    if (spread < 1e-6 && level < 1e-6) {
        fit.l1 = 0.0;
        fit.identifiable = level > 1e-6;
        return fit;
    }
    auto cost = [&](double l1) {
        const auto pred = markov_leakage_series(cycles, l1, cz_per_cycle, t_cycle_s, t1_s);
        double ss = 0.0;
        for (std::size_t i = 0; i < leaked.size(); ++i)
            ss += (pred[i] - leaked[i]) * (pred[i] - leaked[i]);
        return ss;
    };
    // golden-section search on [0, 0.25]
    double a = 0.0, b = 0.25;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = cost(c), fd = cost(d);
    for (int it = 0; it < 200; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = cost(d);
        }
        if (b - a < 1e-10) break;
    }
    fit.l1 = 0.5 * (a + b);
    fit.residual = std::sqrt(cost(fit.l1) / cycles.size());
    return fit;
}

}  // namespace s7sim::calib
