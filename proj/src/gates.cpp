#include "s7sim/gates.hpp"

#include <cmath>
#include <stdexcept>

namespace s7sim::gates {

std::vector<cplx> rphi(double theta, double phi, int dim) {
    std::vector<cplx> u(static_cast<std::size_t>(dim) * dim, cplx(0.0, 0.0));
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    u[0 * dim + 0] = c;
    u[0 * dim + 1] = -s * std::exp(cplx(0.0, -phi));
    u[1 * dim + 0] = s * std::exp(cplx(0.0, phi));
    u[1 * dim + 1] = c;
    if (dim > 2) u[2 * dim + 2] = 1.0;
    return u;
}

std::vector<cplx> rz(double theta, int dim) {
    std::vector<cplx> u(static_cast<std::size_t>(dim) * dim, cplx(0.0, 0.0));
    u[0 * dim + 0] = 1.0;
    u[1 * dim + 1] = std::exp(cplx(0.0, theta));
    if (dim > 2) u[2 * dim + 2] = 1.0;
    return u;
}

std::vector<cplx> cz_phases(double p01, double p10, double p11, int dim_a, int dim_b) {
    const int m = dim_a * dim_b;
    std::vector<cplx> u(static_cast<std::size_t>(m) * m, cplx(0.0, 0.0));
    for (int a = 0; a < dim_a; ++a)
        for (int b = 0; b < dim_b; ++b) {
            double phase = 0.0;
            if (a <= 1 && b <= 1) phase = (a == 0) ? (b == 0 ? 0.0 : p01) : (b == 0 ? p10 : p11);
            const int i = a * dim_b + b;
            u[i * m + i] = std::exp(cplx(0.0, phase));
        }
    return u;
}

std::vector<cplx> cz_with_leakage(double l1, bool leak_first, int dim_a, int dim_b,
                                  double p01, double p10, double p11) {
    if (l1 < 0.0 || 4.0 * l1 > 1.0) throw std::invalid_argument("leakage rate out of range");
    const int leak_dim = leak_first ? dim_a : dim_b;
    if (l1 > 0.0 && leak_dim < 3)
        throw std::invalid_argument("leak target site must have three levels");
    const int m = dim_a * dim_b;
    std::vector<cplx> u = cz_phases(p01, p10, p11, dim_a, dim_b);
    if (l1 == 0.0) return u;
    const int i11 = 1 * dim_b + 1;
    const int ileak = leak_first ? (2 * dim_b + 0) : (0 * dim_b + 2);
    const double s = std::sqrt(4.0 * l1);
    const double c = std::sqrt(1.0 - 4.0 * l1);
    // phases applied after the exchange
    const cplx ph11 = std::exp(cplx(0.0, p11));
    u[i11 * m + i11] = ph11 * c;
    u[ileak * m + i11] = s;
    u[i11 * m + ileak] = -ph11 * s;
    u[ileak * m + ileak] = c;
    return u;
}

std::vector<cplx> kron(const std::vector<cplx>& a, int da, const std::vector<cplx>& b, int db) {
    const int m = da * db;
    std::vector<cplx> out(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j)
            for (int k = 0; k < db; ++k)
                for (int l = 0; l < db; ++l)
                    out[(i * db + k) * m + (j * db + l)] = a[i * da + j] * b[k * db + l];
    return out;
}

std::vector<cplx> matmul(const std::vector<cplx>& a, const std::vector<cplx>& b, int n) {
    std::vector<cplx> out(static_cast<std::size_t>(n) * n, cplx(0.0, 0.0));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const cplx aik = a[i * n + k];
            if (aik == cplx(0.0, 0.0)) continue;
            for (int j = 0; j < n; ++j) out[i * n + j] += aik * b[k * n + j];
        }
    return out;
}

}  // namespace s7sim::gates
