#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "s7sim/calibration.hpp"
#include "s7sim/circuits.hpp"
#include "s7sim/executor.hpp"
#include "s7sim/noise.hpp"
#include "s7sim/tomography.hpp"

namespace s7sim::expt {

/// One repeated-detection experiment: preparation, n cycles conditioned on
/// trivial syndromes, and a destructive logical measurement.
struct DetectionRecord {
    circuits::PrepAngles angles;
    circuits::Scheme scheme = circuits::Scheme::pipelined;
    int cycles = 0;
    circuits::LogicalBasis basis = circuits::LogicalBasis::Z;

    std::vector<double> cycle_retention;     // product of ancilla branch probs per cycle
    double final_syndrome_probability = 1.0; // trivial final checks given retained
    double retained_fraction = 0.0;          // P(n), includes the preparation factor
    double assembly_logical_value = 0.0;     // declared-outcome average among retained
    double op_x = 0.0, op_y = 0.0, op_z = 0.0;  // operator expectations, conditioned state
    double wall_clock_ns = 0.0;
    bool zero_branch = false;
};

DetectionRecord run_detection(const circuits::PrepAngles& angles, circuits::Scheme scheme,
                              int cycles, const noise::NoiseModel& model,
                              circuits::LogicalBasis basis = circuits::LogicalBasis::Z,
                              double echo_axis_phi = 0.0,
                              bool with_operator_expectations = true);

/// Bernoulli shot records drawn from the exact branch structure of a
/// detection record.
struct SampledDetection {
    long shots = 0;
    long retained = 0;
    std::vector<long> discarded_at_cycle;
    std::map<std::string, long> final_strings;  // retained runs only
    double retained_fraction() const { return static_cast<double>(retained) / shots; }
};
SampledDetection sample_detection(const DetectionRecord& record,
                                  const exec::AssemblyStats& stats, long shots,
                                  std::uint64_t seed);
/// Convenience wrapper that reruns the exact experiment to get the final
/// string distribution.
SampledDetection run_detection_sampled(const circuits::PrepAngles& angles,
                                       circuits::Scheme scheme, int cycles,
                                       const noise::NoiseModel& model, long shots,
                                       std::uint64_t seed,
                                       circuits::LogicalBasis basis = circuits::LogicalBasis::Z);

/// Logical-state initialization table (both non-fault-tolerant and
/// fault-tolerant preparations where they differ).
struct InitResult {
    std::string state;
    std::string variant;  // "nonft" or "ft"
    double f4q = 0.0;     // four-qubit fidelity to the ideal target
    double fl = 0.0;      // logical fidelity after codespace projection
    double retained = 0.0;
};
std::vector<InitResult> run_cardinal_init_suite(const noise::NoiseModel& model,
                                                circuits::Scheme scheme);

/// Angle sweeps of the three destructive logical measurements.
struct SweepPoint {
    double angle = 0.0;
    double zl = 0.0, xl = 0.0, yl = 0.0;     // declared-outcome averages
    double p_zl = 0.0, p_xl = 0.0, p_yl = 0.0;  // retained fractions per basis
    double fl = 0.0;  // logical fidelity of the prepared state to its ideal
};
struct SweepResult {
    bool equatorial = true;
    std::vector<SweepPoint> points;
    // max|<O_L>| amplitudes from a scaled fit of the ideal curve
    double amp_zl = 0.0, amp_xl = 0.0, amp_yl = 0.0;
    double mean_fl = 1.0;
    /// assignment fidelity from (2F_R - 1)(2F_L - 1) = max |<O_L>|
    double flr(double amplitude) const;
};
SweepResult run_logical_measurement_sweep(bool equatorial, int grid_points,
                                          const noise::NoiseModel& model,
                                          circuits::Scheme scheme);

/// Error-detection-rate comparison of the two schedules over the cardinal
/// input states.
struct SchemeComparison {
    struct Entry {
        std::string state;
        double gamma_pipelined = 0.0;
        double gamma_parallel = 0.0;
        double ratio = 0.0;
    };
    std::vector<Entry> entries;
    double average_ratio = 0.0;
    std::map<std::string, std::vector<DetectionRecord>> records;  // "state/scheme" keyed
};
SchemeComparison compare_schemes(int n_max, const noise::NoiseModel& model);

/// Retention curves and fitted rates for the cumulative model levels and a
/// leakage sweep on top of the full stack.
struct AblationResult {
    struct Curve {
        int level = 0;
        double l1 = 0.0;
        std::vector<double> cycles;
        std::vector<double> retained;
        calib::DecayFit fit;
    };
    std::vector<Curve> model_curves;  // levels 0..4
    std::vector<Curve> l1_curves;     // level 5 over the grid
};
AblationResult run_model_ablation(const noise::DeviceParams& device,
                                  const std::vector<double>& l1_grid, int n_max,
                                  circuits::Scheme scheme = circuits::Scheme::pipelined);

/// Ideal 16-amplitude target of a named cardinal state embedded in a data
/// register of the given dimensions.
std::vector<cplx> embed_data_state(const std::vector<cplx>& amplitudes,
                                   const QuditRegister& data_reg);

}  // namespace s7sim::expt
