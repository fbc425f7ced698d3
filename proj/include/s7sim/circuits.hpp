#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "s7sim/density_matrix.hpp"

// Timed circuits for the seven-transmon layout. Durations are fixed by the
// platform: 20 ns single-qubit pulses, 60 ns CZ and parking, 540 ns readout.
//
// A stabilizer cycle measures Z1Z3 (ancilla A1), X1X2X3X4 (A2) and Z2Z4 (A3).
// The pipelined schedule runs the X-check coherent block during the Z-ancilla
// readout and the next cycle's Z block during the X-ancilla readout, giving an
// 840 ns period; the parallel schedule reads all three ancillas out
// simultaneously for a 1000 ns period. The CZ order inside the X check is
// D1, D3, D2, D4 so that an ancilla error propagates at worst to a stabilizer
// or to a single detectable data error.

namespace s7sim::circuits {

constexpr double kSingleQubitNs = 20.0;
constexpr double kTwoQubitNs = 60.0;
constexpr double kReadoutNs = 540.0;
constexpr double kPipelinedPeriodNs = 840.0;
constexpr double kParallelPeriodNs = 1000.0;

enum class Kind { rotation, cz, park, measure, idle };

enum class Scheme { pipelined, parallel };
Scheme scheme_from_string(const std::string& name);
std::string to_string(Scheme s);

struct TimedInstruction {
    Kind kind = Kind::idle;
    std::vector<std::string> sites;
    double t_start_ns = 0.0;
    double duration_ns = 0.0;
    // rotation parameters
    double theta = 0.0;
    double phi = 0.0;
    // CZ bookkeeping
    std::string fluxed_site;     // transmon moved to the interaction point
    bool leak_swap_first = false;  // population exchanged with |20> instead of |02>
    // measurement handling: condition the run on this declared outcome, or
    // sample when running in sampled mode
    int condition_outcome = 0;
    int cycle_index = -1;

    double t_end_ns() const { return t_start_ns + duration_ns; }
};

struct TimedCircuit {
    std::vector<std::string> site_labels;
    std::vector<TimedInstruction> instructions;
    double cycle_period_ns = 0.0;
    int num_cycles = 0;

    double total_duration_ns() const;
    void append(TimedInstruction ins);
    /// Throws if two instructions overlap on a site.
    void validate() const;
    /// Line-oriented dump: `t_start_ns duration_ns kind sites [params]`.
    std::string dump() const;
};

struct PrepAngles {
    double theta = 0.0;
    double phi = 0.0;
};

/// Product-state preparation: R_y^theta on D1 and R_phi^theta on D3.
TimedCircuit build_prep(const PrepAngles& angles);
/// Fault-tolerant |+_L>/|-_L> preparation from |++++> / |++-->.
TimedCircuit build_prep_plus_minus(bool minus);

/// Append one error-detection cycle starting at the scheme period boundary.
/// In the pipelined schedule the X ancilla is still being read out while the
/// next cycle's Z block runs, so its parking pulse is dropped then;
/// `a2_free_for_park` marks cycles with no preceding overlapping readout.
void append_cycle(TimedCircuit& circuit, Scheme scheme, int cycle_index, double t0,
                  double echo_axis_phi = 0.0, bool a2_free_for_park = true);
/// Full circuit: preparation followed by n cycles.
TimedCircuit build_detection_circuit(const PrepAngles& angles, Scheme scheme, int cycles,
                                     double echo_axis_phi = 0.0);
TimedCircuit build_cycle(Scheme scheme);

/// Standalone parity-check block. `Z13`/`Z24` use two CZs, `Z1234` four.
enum class Check { Z13, Z1234, Z24 };
Check check_from_string(const std::string& name);
const std::vector<std::string>& check_data_sites(Check c);
std::string check_ancilla(Check c);
struct CheckBlockOptions {
    bool ancilla_rotations = true;
    bool measure = true;
    double t0 = 0.0;
};
TimedCircuit build_parity_check(Check check, const CheckBlockOptions& opt = {});
/// The bare CZ dance of a check (no single-qubit dressing); used by the
/// phase-calibration routines.
TimedCircuit build_check_cz_block(Check check, double t0 = 0.0);

/// Destructive logical measurement: per-site bases, the product giving the
/// logical value, and the parity checks recoverable from the same outcome
/// string.
enum class LogicalBasis { Z, X, Y };
LogicalBasis basis_from_string(const std::string& name);
std::string to_string(LogicalBasis basis);
struct MeasurementAssembly {
    LogicalBasis basis;
    std::array<char, 4> site_basis;           // measurement basis per data qubit
    std::vector<int> value_sites;             // data indices whose product is the logical value
    std::vector<std::vector<int>> check_sets; // each must multiply to +1
};
MeasurementAssembly build_logical_measurement(LogicalBasis basis);
/// Basis pre-rotation pulses for the assembly, then simultaneous readout.
TimedCircuit assembly_circuit(const MeasurementAssembly& assembly, double t0);

/// Logical gates. Transversal Z_L and X_L are pulse-only; rotations about
/// Z_L and X_L go through ancilla A2 and post-select on its +1 outcome.
enum class LogicalGate { Z, X, Xhalf, Zrot, Xrot };
struct LogicalGateSpec {
    LogicalGate gate;
    double angle = 0.0;  // rotation gates only
};
LogicalGateSpec gate_from_string(const std::string& name);
std::string gate_name(const LogicalGateSpec& spec);
struct GateCircuit {
    TimedCircuit circuit;
    bool post_selected = false;  // true when an ancilla outcome is conditioned
    // Ideal logical action as a 2x2 unitary in the {|0_L>,|1_L>} basis.
    std::array<cplx, 4> ideal_unitary;
};
GateCircuit build_logical_gate(const LogicalGateSpec& spec, double t0 = 0.0);

/// CZ pairs of the layout with their flux/parking roles.
struct CzInfo {
    std::string ancilla;
    std::string data;
    std::string fluxed;
    bool leak_swap_first;           // A1-D3 exchanges with |20>
    std::vector<std::string> parks; // middle-frequency spectators to park
};
const std::vector<CzInfo>& cz_table();
const CzInfo& cz_info(const std::string& ancilla, const std::string& data);

}  // namespace s7sim::circuits
