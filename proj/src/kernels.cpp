#include "s7sim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace s7sim::kernels {

namespace {
Backend g_backend = Backend::openmp;

bool parallel_ok() {
#ifdef _OPENMP
    // Avoid nested parallel regions when an experiment loop is already
    // fanned out across threads.
    return g_backend == Backend::openmp && !omp_in_parallel();
#else
    return false;
#endif
}
}  // namespace

Backend backend() { return g_backend; }
void set_backend(Backend b) { g_backend = b; }

EmbedPlan make_embed_plan(const std::vector<int>& dims, const std::vector<int>& sites) {
    const int n = static_cast<int>(dims.size());
    std::vector<std::size_t> stride(n, 1);
    for (int k = n - 2; k >= 0; --k) stride[k] = stride[k + 1] * dims[k + 1];

    EmbedPlan plan;
    plan.dim = stride[0] * dims[0];

    std::vector<bool> targeted(n, false);
    for (int s : sites) {
        if (s < 0 || s >= n) throw std::out_of_range("site index out of range");
        if (targeted[s]) throw std::invalid_argument("duplicate site in operator");
        targeted[s] = true;
        plan.local_dim *= dims[s];
    }

    // local offsets, first listed site most significant
    plan.local_offset.assign(plan.local_dim, 0);
    {
        std::size_t rep = plan.local_dim;
        for (int s : sites) {
            rep /= dims[s];
            std::size_t idx = 0;
            while (idx < plan.local_dim) {
                for (int v = 0; v < dims[s]; ++v)
                    for (std::size_t r = 0; r < rep; ++r) plan.local_offset[idx++] += v * stride[s];
            }
        }
    }

    std::size_t rest_dim = plan.dim / plan.local_dim;
    plan.rest_offset.assign(rest_dim, 0);
    {
        std::size_t rep = rest_dim;
        for (int s = 0; s < n; ++s) {
            if (targeted[s]) continue;
            rep /= dims[s];
            std::size_t idx = 0;
            while (idx < rest_dim) {
                for (int v = 0; v < dims[s]; ++v)
                    for (std::size_t r = 0; r < rep; ++r) plan.rest_offset[idx++] += v * stride[s];
            }
        }
    }
    return plan;
}

namespace {

// One (row-block, col-block) tile: B <- sum_k op_k B op_k^dagger.
inline void conjugate_tile(cplx* rho, std::size_t dim, std::size_t m,
                           const std::size_t* loc, std::size_t row_base, std::size_t col_base,
                           const std::vector<std::vector<cplx>>& ops,
                           cplx* scratch_in, cplx* scratch_acc, cplx* scratch_tmp) {
    for (std::size_t a = 0; a < m; ++a) {
        const cplx* row = rho + (row_base + loc[a]) * dim + col_base;
        for (std::size_t b = 0; b < m; ++b) scratch_in[a * m + b] = row[loc[b]];
    }
    std::fill(scratch_acc, scratch_acc + m * m, cplx(0.0, 0.0));
    for (const auto& op : ops) {
        const cplx* K = op.data();
        // tmp = K * in
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) {
                cplx acc(0.0, 0.0);
                for (std::size_t c = 0; c < m; ++c) acc += K[a * m + c] * scratch_in[c * m + b];
                scratch_tmp[a * m + b] = acc;
            }
        // acc += tmp * K^dagger
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) {
                cplx acc(0.0, 0.0);
                for (std::size_t c = 0; c < m; ++c)
                    acc += scratch_tmp[a * m + c] * std::conj(K[b * m + c]);
                scratch_acc[a * m + b] += acc;
            }
    }
    for (std::size_t a = 0; a < m; ++a) {
        cplx* row = rho + (row_base + loc[a]) * dim + col_base;
        for (std::size_t b = 0; b < m; ++b) row[loc[b]] = scratch_acc[a * m + b];
    }
}

}  // namespace

void conjugate_blocks_serial(cplx* rho, const EmbedPlan& plan,
                             const std::vector<std::vector<cplx>>& ops) {
    const std::size_t m = plan.local_dim;
    const std::size_t nrest = plan.rest_offset.size();
    std::vector<cplx> in(m * m), acc(m * m), tmp(m * m);
    for (std::size_t r = 0; r < nrest; ++r)
        for (std::size_t c = 0; c < nrest; ++c)
            conjugate_tile(rho, plan.dim, m, plan.local_offset.data(), plan.rest_offset[r],
                           plan.rest_offset[c], ops, in.data(), acc.data(), tmp.data());
}

Superop superop_from_ops(const std::vector<std::vector<cplx>>& ops, std::size_t m) {
    Superop s;
    s.local_dim = m;
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            for (std::size_t c = 0; c < m; ++c)
                for (std::size_t d = 0; d < m; ++d) {
                    cplx acc(0.0, 0.0);
                    for (const auto& k : ops) acc += k[a * m + c] * std::conj(k[b * m + d]);
                    if (std::abs(acc) > 0.0)
                        s.entries.push_back({static_cast<std::uint32_t>(a),
                                             static_cast<std::uint32_t>(b),
                                             static_cast<std::uint32_t>(c),
                                             static_cast<std::uint32_t>(d), acc});
                }
    return s;
}

Superop superop_identity(std::size_t m) {
    Superop s;
    s.local_dim = m;
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            s.entries.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                                 static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                                 cplx(1.0, 0.0)});
    return s;
}

Superop compose(const Superop& after, const Superop& before) {
    if (after.local_dim != before.local_dim)
        throw std::invalid_argument("superoperator dimension mismatch");
    const std::size_t m = after.local_dim;
    std::vector<cplx> dense(m * m * m * m, cplx(0.0, 0.0));
    for (const auto& e2 : after.entries)
        for (const auto& e1 : before.entries) {
            if (e2.in_row != e1.out_row || e2.in_col != e1.out_col) continue;
            dense[((e2.out_row * m + e2.out_col) * m + e1.in_row) * m + e1.in_col] +=
                e2.val * e1.val;
        }
    Superop s;
    s.local_dim = m;
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            for (std::size_t c = 0; c < m; ++c)
                for (std::size_t d = 0; d < m; ++d) {
                    const cplx v = dense[((a * m + b) * m + c) * m + d];
                    if (std::abs(v) > 0.0)
                        s.entries.push_back({static_cast<std::uint32_t>(a),
                                             static_cast<std::uint32_t>(b),
                                             static_cast<std::uint32_t>(c),
                                             static_cast<std::uint32_t>(d), v});
                }
    return s;
}

Superop tensor(const Superop& a, const Superop& b) {
    Superop s;
    const auto mb = static_cast<std::uint32_t>(b.local_dim);
    s.local_dim = a.local_dim * b.local_dim;
    for (const auto& ea : a.entries)
        for (const auto& eb : b.entries)
            s.entries.push_back({ea.out_row * mb + eb.out_row, ea.out_col * mb + eb.out_col,
                                 ea.in_row * mb + eb.in_row, ea.in_col * mb + eb.in_col,
                                 ea.val * eb.val});
    return s;
}

namespace {
inline void sparse_tile(cplx* rho, std::size_t dim, std::size_t m, const std::size_t* loc,
                        std::size_t row_base, std::size_t col_base,
                        const std::vector<SuperopEntry>& entries, cplx* in, cplx* out) {
    for (std::size_t a = 0; a < m; ++a) {
        const cplx* row = rho + (row_base + loc[a]) * dim + col_base;
        for (std::size_t b = 0; b < m; ++b) in[a * m + b] = row[loc[b]];
    }
    std::fill(out, out + m * m, cplx(0.0, 0.0));
    for (const auto& e : entries)
        out[e.out_row * m + e.out_col] += e.val * in[e.in_row * m + e.in_col];
    for (std::size_t a = 0; a < m; ++a) {
        cplx* row = rho + (row_base + loc[a]) * dim + col_base;
        for (std::size_t b = 0; b < m; ++b) row[loc[b]] = out[a * m + b];
    }
}
}  // namespace

void apply_superop(cplx* rho, const EmbedPlan& plan, const Superop& s) {
    const std::size_t m = plan.local_dim;
    if (s.local_dim != m) throw std::invalid_argument("superoperator does not match plan");
    const std::size_t nrest = plan.rest_offset.size();
    if (!parallel_ok()) {
        std::vector<cplx> in(m * m), out(m * m);
        for (std::size_t r = 0; r < nrest; ++r)
            for (std::size_t c = 0; c < nrest; ++c)
                sparse_tile(rho, plan.dim, m, plan.local_offset.data(), plan.rest_offset[r],
                            plan.rest_offset[c], s.entries, in.data(), out.data());
        return;
    }
#ifdef _OPENMP
#pragma omp parallel
    {
        std::vector<cplx> in(m * m), out(m * m);
#pragma omp for collapse(2) schedule(static)
        for (std::size_t r = 0; r < nrest; ++r)
            for (std::size_t c = 0; c < nrest; ++c)
                sparse_tile(rho, plan.dim, m, plan.local_offset.data(), plan.rest_offset[r],
                            plan.rest_offset[c], s.entries, in.data(), out.data());
    }
#endif
}

void conjugate_blocks(cplx* rho, const EmbedPlan& plan,
                      const std::vector<std::vector<cplx>>& ops) {
    apply_superop(rho, plan, superop_from_ops(ops, plan.local_dim));
}

void apply_diagonal_serial(cplx* rho, std::size_t dim, const cplx* w) {
    for (std::size_t i = 0; i < dim; ++i) {
        cplx* row = rho + i * dim;
        const cplx wi = w[i];
        for (std::size_t j = 0; j < dim; ++j) row[j] *= wi * std::conj(w[j]);
    }
}

void apply_diagonal(cplx* rho, std::size_t dim, const cplx* w) {
    if (!parallel_ok()) {
        apply_diagonal_serial(rho, dim, w);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < dim; ++i) {
        cplx* row = rho + i * dim;
        const cplx wi = w[i];
        for (std::size_t j = 0; j < dim; ++j) row[j] *= wi * std::conj(w[j]);
    }
#endif
}

double diagonal_expectation(const cplx* rho, std::size_t dim, const double* w) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) acc += w[i] * rho[i * dim + i].real();
    return acc;
}

double max_abs_diff(const cplx* a, const cplx* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace s7sim::kernels
