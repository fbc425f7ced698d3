#pragma once

#include <complex>
#include <vector>

#include "s7sim/density_matrix.hpp"

// Gate matrices used across the project. Single-qubit rotations follow the
// convention
//
//   rphi(theta, phi) |0> = cos(theta/2) |0> + e^{i phi} sin(theta/2) |1>,
//
// i.e. phi = 0 is a y rotation and phi = -pi/2 an x rotation. On a qutrit
// site the qubit block is embedded and |2> is left alone.

namespace s7sim::gates {

/// Equatorial-axis rotation on a site of dimension `dim` (2 or 3).
std::vector<cplx> rphi(double theta, double phi, int dim = 2);
/// Frame-update style Z rotation diag(1, e^{i theta}).
std::vector<cplx> rz(double theta, int dim = 2);

/// Two-site controlled-phase diag over |ab>: phases (1, e^{i p01}, e^{i p10},
/// e^{i p11}); states involving level 2 pick up no phase.
std::vector<cplx> cz_phases(double p01, double p10, double p11, int dim_a = 2, int dim_b = 2);
inline std::vector<cplx> cz(int dim_a = 2, int dim_b = 2) {
    return cz_phases(0.0, 0.0, 3.14159265358979323846, dim_a, dim_b);
}

/// CZ with coherent population exchange between |11> and the leak state
/// (|02> by default, |20> when `leak_first` is set). Transfer probability is
/// 4*l1; the exchange is a real rotation with zero exchange phase applied
/// before the conditional phases.
std::vector<cplx> cz_with_leakage(double l1, bool leak_first, int dim_a, int dim_b,
                                  double p01 = 0.0, double p10 = 0.0,
                                  double p11 = 3.14159265358979323846);

std::vector<cplx> kron(const std::vector<cplx>& a, int da, const std::vector<cplx>& b, int db);
std::vector<cplx> matmul(const std::vector<cplx>& a, const std::vector<cplx>& b, int n);

}  // namespace s7sim::gates
