#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "s7sim/kernels.hpp"
#include "s7sim/register.hpp"

namespace s7sim {

using cplx = std::complex<double>;

struct KrausChannel {
    std::vector<int> sites;
    std::vector<std::vector<cplx>> operators;  // each local_dim x local_dim, row-major
    bool trace_preserving = true;
};

/// One measurement outcome: a diagonal operator with entries sqrt(P(i|j))
/// on a single site.
struct PovmElement {
    int outcome = 0;
    std::vector<double> diag;  // length = site dimension
};

using Povm = std::vector<PovmElement>;

struct MeasureResult;

/// Exact density operator over a QuditRegister. Mutating operations keep the
/// matrix Hermitian and trace-preserving (conditioned branches excepted).
class DensityMatrix {
  public:
    DensityMatrix(QuditRegister reg, const std::vector<int>& occupations);
    static DensityMatrix from_pure(QuditRegister reg, const std::vector<cplx>& amplitudes);
    static DensityMatrix from_matrix(QuditRegister reg, std::vector<cplx> elements);

    const QuditRegister& reg() const { return reg_; }
    std::size_t dim() const { return reg_.total_dim(); }
    const std::vector<cplx>& elements() const { return data_; }
    std::vector<cplx>& elements() { return data_; }
    cplx at(std::size_t i, std::size_t j) const { return data_[i * dim() + j]; }

    /// rho -> U rho U^dagger on the given sites; U is checked for unitarity.
    void apply_unitary(const std::vector<cplx>& u, const std::vector<int>& sites);
    /// rho -> sum_k K rho K^dagger; completeness checked when the channel is
    /// flagged trace-preserving.
    void apply_kraus(const KrausChannel& channel);
    /// Diagonal unitary given by per-local-basis phases on the given sites.
    void apply_phase_diagonal(const std::vector<cplx>& local_diag, const std::vector<int>& sites);
    /// Pre-composed channel fast path; the caller guarantees physicality.
    void apply_superop(const kernels::Superop& s, const std::vector<int>& sites);

    /// Condition on one POVM outcome. Probability-0 branches come back with
    /// an empty state.
    MeasureResult measure_condition(int site, int outcome, const Povm& povm) const;
    /// Outcome probabilities without conditioning.
    std::vector<double> outcome_probabilities(int site, const Povm& povm) const;

    /// Tr(rho O) for a product operator given per-site as a token string,
    /// e.g. "ZIZI". Tokens: I X Y Z (Paulis act on levels 0/1 and annihilate
    /// level 2) and '2' for the leak projector |2><2|.
    double expectation(const std::string& pauli_string) const;
    /// Tr(rho O) for an explicit product of per-site matrices.
    cplx expectation(const std::vector<std::vector<cplx>>& site_ops,
                     const std::vector<int>& sites) const;

    DensityMatrix partial_trace(const std::vector<int>& keep) const;

    double trace() const;
    double purity() const;
    void renormalize();
    void scale(double factor);
    /// Convex mixture: rho -> (1-w) rho + w other.
    void mix(const DensityMatrix& other, double w);

    double hermiticity_error() const;
    double min_eigenvalue() const;  // dense eigensolve; intended for tests

    /// <psi| rho |psi> for a pure target given as amplitudes over the full
    /// register basis.
    double fidelity_with_pure(const std::vector<cplx>& amplitudes) const;

  private:
    explicit DensityMatrix(QuditRegister reg);
    QuditRegister reg_;
    std::vector<cplx> data_;
};

struct MeasureResult {
    double probability = 0.0;
    // Empty when the branch has probability ~0; a signaled condition, not an
    // error.
    std::optional<DensityMatrix> state;
};

/// Pauli embedded on a d-level site: qubit block on levels 0/1, zero on
/// level 2. 'I' stays the full identity.
std::vector<cplx> site_operator(char token, int dim);

}  // namespace s7sim
