#pragma once

#include <complex>
#include <cstdint>
#include <vector>

// Dense density-matrix update kernels.
//
// Every kernel comes in two flavors: a plain serial implementation used as
// the reference in tests, and an OpenMP version used by default. The
// dispatch is a process-wide switch so experiments can pin the backend.

namespace s7sim::kernels {

using cplx = std::complex<double>;

enum class Backend { serial, openmp };

Backend backend();
void set_backend(Backend b);

// Index plan for an operator acting on a subset of sites of a mixed-dimension
// register. `rest_offset[r] + local_offset[l]` enumerates all basis indices,
// with `l` running over the targeted sites in the order they were given.
struct EmbedPlan {
    std::vector<std::size_t> rest_offset;
    std::vector<std::size_t> local_offset;
    std::size_t local_dim = 1;
    std::size_t dim = 1;
};

EmbedPlan make_embed_plan(const std::vector<int>& dims, const std::vector<int>& sites);

// rho <- sum_k op_k rho op_k^dagger, each op_k a local_dim x local_dim matrix
// (row-major) on the sites described by the plan. A single unitary is the
// one-element case.
void conjugate_blocks(cplx* rho, const EmbedPlan& plan,
                      const std::vector<std::vector<cplx>>& ops);
void conjugate_blocks_serial(cplx* rho, const EmbedPlan& plan,
                             const std::vector<std::vector<cplx>>& ops);

// Sparse local superoperator sum_k K_k (x) conj(K_k). Channels compose and
// tensor at this level, so a gate and its surrounding noise cost one sweep
// over the matrix instead of one per channel.
struct SuperopEntry {
    std::uint32_t out_row, out_col, in_row, in_col;
    cplx val;
};
struct Superop {
    std::size_t local_dim = 1;
    std::vector<SuperopEntry> entries;
};

Superop superop_from_ops(const std::vector<std::vector<cplx>>& ops, std::size_t m);
Superop superop_identity(std::size_t m);
/// after ∘ before as channel composition.
Superop compose(const Superop& after, const Superop& before);
/// Product channel on the concatenated local space (first factor most
/// significant).
Superop tensor(const Superop& a, const Superop& b);
void apply_superop(cplx* rho, const EmbedPlan& plan, const Superop& s);

// rho[i][j] *= w[i] * conj(w[j]) for a per-basis-state weight vector.
void apply_diagonal(cplx* rho, std::size_t dim, const cplx* w);
void apply_diagonal_serial(cplx* rho, std::size_t dim, const cplx* w);

// sum_i w[i] * rho[i][i], deterministic serial accumulation.
double diagonal_expectation(const cplx* rho, std::size_t dim, const double* w);

// Frobenius norm of the difference of two matrices (used by tests and bench).
double max_abs_diff(const cplx* a, const cplx* b, std::size_t n);

}  // namespace s7sim::kernels
