#pragma once

#include <complex>
#include <random>
#include <vector>

// Brute-force dense helpers, independent of the library's embedding and
// kernel code. Everything here builds full matrices by explicit Kronecker
// products.

namespace testutil {

using cplx = std::complex<double>;
using Mat = std::vector<std::vector<cplx>>;

inline Mat identity(int n) {
    Mat m(n, std::vector<cplx>(n, cplx(0, 0)));
    for (int i = 0; i < n; ++i) m[i][i] = 1.0;
    return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
    const int ra = a.size(), ca = a[0].size(), rb = b.size(), cb = b[0].size();
    Mat m(ra * rb, std::vector<cplx>(ca * cb, cplx(0, 0)));
    for (int i = 0; i < ra; ++i)
        for (int j = 0; j < ca; ++j)
            for (int k = 0; k < rb; ++k)
                for (int l = 0; l < cb; ++l) m[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
    return m;
}

inline Mat mul(const Mat& a, const Mat& b) {
    const int n = a.size(), m = b[0].size(), k = b.size();
    Mat out(n, std::vector<cplx>(m, cplx(0, 0)));
    for (int i = 0; i < n; ++i)
        for (int p = 0; p < k; ++p)
            for (int j = 0; j < m; ++j) out[i][j] += a[i][p] * b[p][j];
    return out;
}

inline Mat dagger(const Mat& a) {
    Mat out(a[0].size(), std::vector<cplx>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[0].size(); ++j) out[j][i] = std::conj(a[i][j]);
    return out;
}

inline Mat add(const Mat& a, const Mat& b) {
    Mat out = a;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[0].size(); ++j) out[i][j] += b[i][j];
    return out;
}

/// Embed a single-site operator at position `site` of an n-site register of
/// per-site dimensions `dims`.
inline Mat embed_single(const Mat& op, int site, const std::vector<int>& dims) {
    Mat out = identity(1);
    for (std::size_t s = 0; s < dims.size(); ++s)
        out = kron(out, static_cast<int>(s) == site ? op : identity(dims[s]));
    return out;
}

inline Mat conj_by(const Mat& u, const Mat& rho) { return mul(mul(u, rho), dagger(u)); }

inline double max_diff(const Mat& a, const std::vector<cplx>& flat) {
    double m = 0.0;
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m = std::max(m, std::abs(a[i][j] - flat[i * n + j]));
    return m;
}

inline Mat from_flat(const std::vector<cplx>& flat, int n) {
    Mat m(n, std::vector<cplx>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i][j] = flat[i * n + j];
    return m;
}

inline Mat random_density(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat a(n, std::vector<cplx>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[i][j] = cplx(g(rng), g(rng));
    Mat rho = mul(a, dagger(a));
    cplx tr(0, 0);
    for (int i = 0; i < n; ++i) tr += rho[i][i];
    for (auto& row : rho)
        for (auto& v : row) v /= tr;
    return rho;
}

inline Mat random_unitary2(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    // QR of a Ginibre matrix
    cplx a(g(rng), g(rng)), b(g(rng), g(rng));
    const double na = std::sqrt(std::norm(a) + std::norm(b));
    a /= na;
    b /= na;
    // second column orthogonal to (a, b)
    return Mat{{a, -std::conj(b)}, {b, std::conj(a)}};
}

}  // namespace testutil
