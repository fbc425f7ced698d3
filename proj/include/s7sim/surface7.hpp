#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "s7sim/density_matrix.hpp"

// Distance-2 surface code on data qubits D1..D4 with ancillas A1..A3.
// Tensor-factor order is D1,D2,D3,D4 left to right; D1 is the most
// significant index. The codespace is the joint +1 eigenspace of
// Z1Z3, X1X2X3X4 and Z2Z4.

namespace s7sim::surface7 {

inline const std::vector<std::string> kDataLabels = {"D1", "D2", "D3", "D4"};
inline const std::vector<std::string> kAllLabels = {"D1", "D2", "D3", "D4", "A1", "A2", "A3"};

/// Stabilizer generators as 4-character token strings over D1..D4.
const std::array<std::string, 3>& stabilizers();
/// Representatives of the logical Z (four strings) and X (two strings).
const std::array<std::string, 4>& logical_z_reps();
const std::array<std::string, 2>& logical_x_reps();
/// Y_L = +i X_L Z_L as a single product string.
const std::string& logical_y_rep();

/// |0_L> and |1_L> as 16-dimensional unit vectors.
std::pair<std::vector<cplx>, std::vector<cplx>> logical_basis();

/// 16x16 codespace projector, product of (I+s)/2 over the stabilizer set.
const std::vector<cplx>& codespace_projector();

/// A logical qubit state as a Bloch vector; `weight` records Tr(rho I_L)
/// from the projection that produced it.
struct LogicalState {
    double x = 0.0, y = 0.0, z = 0.0;
    double weight = 1.0;

    std::array<std::array<cplx, 2>, 2> matrix() const;
    double bloch_norm() const;
};

/// Project a four-qubit density matrix onto the codespace:
/// p_i = Tr(rho sigma_i^L) / Tr(rho I_L) with sigma_i^L the representative
/// string times the projector. Throws when the codespace weight is
/// negligible.
LogicalState project_to_codespace(const DensityMatrix& rho);

/// <psi_L| rho_L |psi_L> for a pure logical target given as a Bloch vector.
double logical_fidelity(const LogicalState& rho, double tx, double ty, double tz);

/// Pure logical state C |0_L> + S e^{i phi} |1_L> as 16 amplitudes.
std::vector<cplx> logical_vector(cplx c0, cplx c1);

/// Cardinal states and their Bloch vectors.
struct Cardinal {
    std::string name;
    double x, y, z;
};
const std::vector<Cardinal>& cardinal_states();

/// Ideal projected state and retention probability for the product-state
/// preparation with angles (theta, phi): the state
/// (C^2 |0_L> + S^2 e^{i phi} |1_L>) / sqrt(C^4 + S^4) with C = cos(theta/2),
/// S = sin(theta/2), kept with probability (C^4 + S^4) / 2.
std::vector<cplx> projected_prep_state(double theta, double phi);
double projected_prep_probability(double theta);

}  // namespace s7sim::surface7
