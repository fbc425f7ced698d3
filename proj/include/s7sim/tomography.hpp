#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "s7sim/circuits.hpp"
#include "s7sim/density_matrix.hpp"
#include "s7sim/noise.hpp"
#include "s7sim/surface7.hpp"

namespace s7sim::tomo {

/// Pauli expectation vector of a k-qubit state, 4^k entries with the
/// index read as a base-4 string over (I, X, Y, Z), first site most
/// significant. values[0] = 1.
struct PauliVector {
    int num_qubits = 1;
    std::vector<double> values;
    std::vector<double> errors;  // binomial error bars in sampled mode
    long shots = 0;              // 0 = exact

    static std::string label(int index, int num_qubits);
};

PauliVector measure_pauli_vector(const DensityMatrix& dm);
PauliVector sample_pauli_vector(const DensityMatrix& dm, long shots, std::uint64_t seed);

/// sum_i p_i sigma_i / 2^k; Hermitian with unit trace but not necessarily PSD.
DensityMatrix linear_inversion(const PauliVector& p);

/// Restrict a register with three-level sites to the all-qubit subspace.
/// Returns the renormalized qubit state and the discarded-weight complement.
std::pair<DensityMatrix, double> qubit_restrict(const DensityMatrix& dm);

struct MleResult {
    DensityMatrix state;
    double cost = 0.0;           // sum of squared expectation residuals
    double stationarity = 0.0;   // first-order optimality residual on the feasible cone
    int iterations = 0;
    bool converged = false;
};

/// Closest physical state to a measured Pauli vector: minimizes
/// sum_i (p_i - Tr(rho sigma_i))^2 over trace-one PSD matrices by
/// alternating projections (PSD eigenvalue clipping against the trace
/// constraint, Dykstra-corrected). Cap 10000 iterations, convergence at
/// 1e-10 between iterates.
MleResult mle_state(const PauliVector& p);

/// 4x4 Pauli transfer matrix, p' = R p with p = (1, x, y, z); row 0 is
/// (1,0,0,0) for a trace-preserving map.
struct Ptm {
    std::array<double, 16> r{};

    double& at(int i, int j) { return r[i * 4 + j]; }
    double at(int i, int j) const { return r[i * 4 + j]; }
    std::array<double, 4> apply(const std::array<double, 4>& p) const;
    static Ptm identity();
};

Ptm ptm_from_unitary(const std::array<cplx, 4>& u);

/// Choi state C = 1/4 sum_ij R_ij sigma_i (x) sigma_j^T; the second factor is
/// the auxiliary input copy. Complete positivity is C >= 0 and trace
/// preservation is the auxiliary partial trace pinned to I/2.
std::array<cplx, 16> choi_from_ptm(const Ptm& r);
Ptm ptm_from_choi(const std::array<cplx, 16>& c);
double choi_min_eigenvalue(const std::array<cplx, 16>& c);

struct TpcpResult {
    Ptm ptm;
    double choi_eigenvalue_floor = 0.0;
    double tp_residual = 0.0;  // max deviation of the partial-trace constraint
    int iterations = 0;
    bool converged = false;
};

/// Nearest trace-preserving completely positive map in Choi Frobenius norm
/// (Dykstra alternating projections between the PSD cone and the
/// partial-trace affine constraint).
TpcpResult tpcp_project(const Ptm& r);

/// F = (Tr(R_ideal^T R) + 2) / 6; both first rows must be (1,0,0,0).
double avg_gate_fidelity(const Ptm& r, const Ptm& ideal);

/// Least-squares PTM from matched input/output Bloch vectors (entries
/// (1,x,y,z)); needs four affinely independent inputs.
Ptm lptm_inversion(const std::vector<std::array<double, 4>>& inputs,
                   const std::vector<std::array<double, 4>>& outputs);

struct ProcessTomographyResult {
    Ptm raw;          // linear inversion
    Ptm physical;     // after the TPCP projection
    Ptm ideal;
    double fidelity = 0.0;  // avg gate fidelity of physical vs ideal
    std::vector<std::array<double, 4>> inputs, outputs;
    std::vector<double> retained_probability;  // per cardinal state, output branch
};

/// Full pipeline for one logical gate: prepare the six cardinal states,
/// characterize input and output four-qubit states, project to the
/// codespace, invert and project to a physical map.
ProcessTomographyResult logical_process_tomography(const circuits::LogicalGateSpec& gate,
                                                   const noise::NoiseModel& model,
                                                   circuits::Scheme scheme);

/// CSV with a header row of Pauli labels followed by matrix rows.
std::string ptm_to_csv(const Ptm& r);

}  // namespace s7sim::tomo
