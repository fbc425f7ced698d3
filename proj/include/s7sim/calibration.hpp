#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "s7sim/circuits.hpp"
#include "s7sim/noise.hpp"

namespace s7sim::calib {

/// Exponential retention fit P(n) = A (1-gamma)^n, linear least squares in
/// log space, optionally weighted by shot counts.
struct DecayFit {
    double amplitude = 0.0;
    double gamma = 0.0;
    double residual = 0.0;  // rms log-space misfit
};
DecayFit fit_detection_rate(const std::vector<double>& cycles, const std::vector<double>& retained,
                            const std::vector<double>& shots = {});

/// Average probability of assigning the correct parity over all computational
/// inputs of the check's data qubits, with the per-input outcome table.
struct ParityBenchmark {
    double average_fidelity = 0.0;
    // input bit string over the check's data qubits -> P(ancilla declared 1)
    std::map<std::string, double> p_declared_one;
};
ParityBenchmark parity_benchmark(circuits::Check check, const noise::NoiseModel& model);

/// Linear system tying Ramsey phases to CZ phase parameters. Unknowns per
/// check: the total single-qubit phase of the ancilla across its CZ block,
/// then one single-qubit phase per data qubit, then one conditional phase per
/// CZ (2k-1 in total); all row coefficients are 0/1. The per-CZ diagonal is
/// recovered with the whole ancilla phase attached to the first CZ.
struct RamseySystem {
    circuits::Check check;
    int num_transmons = 0;                     // k
    std::vector<std::vector<double>> design;   // k * 2^(k-1) rows
    std::vector<double> phases;                // measured, radians
    std::vector<std::string> unknown_names;
};

struct CzPhaseSolution {
    std::vector<double> values;  // wrapped to [0, 2pi)
    double residual = 0.0;       // rms over rows, branch-aware
    bool rank_deficient = false;
    std::vector<std::vector<double>> nullspace;  // basis vectors when deficient
    /// Dressing table keyed "Ax-Dy" -> {p01, p10, p11}.
    std::map<std::string, std::array<double, 3>> to_phase_table(circuits::Check check) const;
};

/// Box-constrained least squares, 0 <= phi < 2pi, with per-row residual
/// branches chosen modulo 2pi.
CzPhaseSolution solve_cz_phases(const RamseySystem& system);

/// Design matrix of a check (no simulation).
RamseySystem make_ramsey_system(circuits::Check check);
/// Simulates the k * 2^(k-1) Ramsey experiments around the check's CZ block
/// under the given noise model and fills in the measured phases.
RamseySystem generate_ramsey_phases(circuits::Check check, const noise::NoiseModel& model,
                                    int analysis_points = 16);

/// Triple-Gaussian readout-voltage model of one transmon.
struct GaussComponent {
    double mean = 0.0, sigma = 1.0, weight = 1.0 / 3;
};
struct VoltageModel {
    std::array<GaussComponent, 3> components;  // |0>, |1>, |2>
    double threshold = 0.0;                    // declare |2> beyond this voltage
    bool low_confidence = false;               // |1>/|2> separation under 2 sigma
    bool degenerate = false;                   // component collapse during the fit
};

struct LeakageEstimate {
    VoltageModel model;
    std::vector<int> cycles;
    std::vector<double> leaked_fraction;  // fraction of shots declared |2>
};

/// Fit the mixture by expectation-maximization (means seeded from per-state
/// calibration shots), pick the threshold that best separates |2> from
/// {|0>,|1>}, and count the shots beyond it per cycle.
LeakageEstimate estimate_leakage(const std::map<int, std::vector<double>>& shots_per_cycle,
                                 const std::array<std::vector<double>, 3>& calibration_shots);

/// Two-state Markov fit of a leakage-population series: per cycle a transmon
/// leaks with rate (CZs fluxing it) * 4 L1 and decays back with rate
/// 1 - exp(-t_cycle / (T1/2)). Returns the L1 minimizing the squared
/// residual over [0, 0.25].
struct L1Fit {
    double l1 = 0.0;
    double residual = 0.0;
    bool identifiable = true;
};
L1Fit estimate_l1_markov(const std::vector<int>& cycles, const std::vector<double>& leaked,
                         int cz_per_cycle, double t_cycle_s, double t1_s);

/// Predicted leaked population under the same Markov chain (used by the fit
/// and by synthetic-data generation).
std::vector<double> markov_leakage_series(const std::vector<int>& cycles, double l1,
                                          int cz_per_cycle, double t_cycle_s, double t1_s);

}  // namespace s7sim::calib
