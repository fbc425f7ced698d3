#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "s7sim/circuits.hpp"
#include "s7sim/density_matrix.hpp"
#include "s7sim/noise.hpp"

namespace s7sim::exec {

struct MeasurementEvent {
    std::string site;
    int cycle_index = -1;
    int declared = 0;
    double probability = 1.0;  // of this outcome given the run so far
};

struct Fault {
    std::size_t instruction_index = 0;  // fault inserted right after this instruction
    std::string site;
    char pauli = 'X';
};

struct RunOptions {
    enum class Mode { conditioned, sampled };
    Mode mode = Mode::conditioned;
    std::uint64_t seed = 0;
    std::vector<Fault> faults;
    std::map<std::size_t, double> cz_l1_override;  // instruction index -> leakage
};

struct RunResult {
    std::optional<DensityMatrix> state;
    double branch_probability = 1.0;  // product over conditioned measurements
    std::vector<MeasurementEvent> events;
    bool zero_branch = false;

    /// Product of conditioned branch probabilities for one cycle.
    double cycle_retention(int cycle_index) const;
};

/// Evolves a density matrix through a timed circuit under a noise model.
/// Relaxation and dephasing act during idles and symmetrically around each
/// gate (half the gate duration on each side); measurements apply the
/// readout POVM at the start of the readout window.
class Runner {
  public:
    explicit Runner(const noise::NoiseModel& model);
    Runner(const noise::NoiseModel& model, std::vector<int> dims);

    const QuditRegister& reg() const { return reg_; }
    /// Product ground state mixed with the per-site residual excitation.
    DensityMatrix initial_state() const;

    RunResult run(const circuits::TimedCircuit& circuit, const RunOptions& opt = {}) const;
    RunResult run(const circuits::TimedCircuit& circuit, DensityMatrix state,
                  const RunOptions& opt = {}) const;

  private:
    kernels::Superop idle_superop(int site, double dt_ns, double dephasing_rate) const;
    void apply_idle(DensityMatrix& dm, int site, double dt_ns, double dephasing_rate) const;

    noise::NoiseModel model_;
    QuditRegister reg_;
};

/// Declared-string statistics of a destructive data-qubit measurement. The
/// state must already carry the assembly's basis pre-rotations.
struct AssemblyStats {
    double check_pass_probability = 0.0;  // all checks trivial
    double logical_expectation = 0.0;     // conditional on passing
    std::map<std::string, double> string_probs;  // declared outcomes, e.g. "0101"
};
AssemblyStats evaluate_assembly(const DensityMatrix& state,
                                const circuits::MeasurementAssembly& assembly,
                                const noise::NoiseModel& model);

/// Unitary Pauli fault on one site (identity on a leaked level).
std::vector<cplx> fault_unitary(char pauli, int dim);

}  // namespace s7sim::exec
