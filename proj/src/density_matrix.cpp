#include "s7sim/density_matrix.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "s7sim/kernels.hpp"

namespace s7sim {

namespace {
constexpr double kUnitaryTol = 1e-10;
constexpr double kCompletenessTol = 1e-10;
constexpr double kBranchFloor = 1e-15;

void check_unitary(const std::vector<cplx>& u, std::size_t m) {
    if (u.size() != m * m) throw std::invalid_argument("operator size does not match target sites");
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            cplx acc(0.0, 0.0);
            for (std::size_t k = 0; k < m; ++k) acc += std::conj(u[k * m + i]) * u[k * m + j];
            const cplx want = (i == j) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
            if (std::abs(acc - want) > kUnitaryTol)
                throw std::invalid_argument("operator is not unitary");
        }
}
}  // namespace

DensityMatrix::DensityMatrix(QuditRegister reg) : reg_(std::move(reg)) {
    data_.assign(reg_.total_dim() * reg_.total_dim(), cplx(0.0, 0.0));
}

DensityMatrix::DensityMatrix(QuditRegister reg, const std::vector<int>& occupations)
    : DensityMatrix(std::move(reg)) {
    const std::size_t idx = reg_.basis_index(occupations);
    data_[idx * dim() + idx] = cplx(1.0, 0.0);
}

DensityMatrix DensityMatrix::from_pure(QuditRegister reg, const std::vector<cplx>& amplitudes) {
    DensityMatrix dm(std::move(reg));
    const std::size_t d = dm.dim();
    if (amplitudes.size() != d) throw std::invalid_argument("amplitude vector length mismatch");
    double norm = 0.0;
    for (const cplx& a : amplitudes) norm += std::norm(a);
    if (norm <= 0.0) throw std::invalid_argument("zero state vector");
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            dm.data_[i * d + j] = amplitudes[i] * std::conj(amplitudes[j]) / norm;
    return dm;
}

DensityMatrix DensityMatrix::from_matrix(QuditRegister reg, std::vector<cplx> elements) {
    DensityMatrix dm(std::move(reg));
    if (elements.size() != dm.dim() * dm.dim())
        throw std::invalid_argument("matrix size mismatch");
    dm.data_ = std::move(elements);
    return dm;
}

void DensityMatrix::apply_unitary(const std::vector<cplx>& u, const std::vector<int>& sites) {
    auto plan = kernels::make_embed_plan(reg_.dims(), sites);
    check_unitary(u, plan.local_dim);
    kernels::conjugate_blocks(data_.data(), plan, {u});
}

void DensityMatrix::apply_kraus(const KrausChannel& channel) {
    auto plan = kernels::make_embed_plan(reg_.dims(), channel.sites);
    const std::size_t m = plan.local_dim;
    if (channel.operators.empty()) throw std::invalid_argument("channel has no operators");
    for (const auto& k : channel.operators)
        if (k.size() != m * m) throw std::invalid_argument("Kraus operator size mismatch");
    if (channel.trace_preserving) {
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                cplx acc(0.0, 0.0);
                for (const auto& k : channel.operators)
                    for (std::size_t c = 0; c < m; ++c)
                        acc += std::conj(k[c * m + i]) * k[c * m + j];
                const cplx want = (i == j) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
                if (std::abs(acc - want) > kCompletenessTol)
                    throw std::invalid_argument("Kraus channel is not trace-preserving");
            }
    }
    kernels::conjugate_blocks(data_.data(), plan, channel.operators);
}

void DensityMatrix::apply_superop(const kernels::Superop& s, const std::vector<int>& sites) {
    auto plan = kernels::make_embed_plan(reg_.dims(), sites);
    kernels::apply_superop(data_.data(), plan, s);
}

void DensityMatrix::apply_phase_diagonal(const std::vector<cplx>& local_diag,
                                         const std::vector<int>& sites) {
    auto plan = kernels::make_embed_plan(reg_.dims(), sites);
    if (local_diag.size() != plan.local_dim)
        throw std::invalid_argument("diagonal size does not match target sites");
    for (const cplx& w : local_diag)
        if (std::abs(std::abs(w) - 1.0) > kUnitaryTol)
            throw std::invalid_argument("phase diagonal is not unitary");
    std::vector<cplx> full(dim(), cplx(1.0, 0.0));
    for (std::size_t r = 0; r < plan.rest_offset.size(); ++r)
        for (std::size_t l = 0; l < plan.local_dim; ++l)
            full[plan.rest_offset[r] + plan.local_offset[l]] = local_diag[l];
    kernels::apply_diagonal(data_.data(), dim(), full.data());
}

std::vector<double> DensityMatrix::outcome_probabilities(int site, const Povm& povm) const {
    const int d = reg_.dim_of(site);
    std::vector<double> probs;
    probs.reserve(povm.size());
    for (const auto& el : povm) {
        if (static_cast<int>(el.diag.size()) != d)
            throw std::invalid_argument("POVM element dimension mismatch");
        std::vector<double> w(dim());
        for (std::size_t i = 0; i < dim(); ++i) {
            const double m = el.diag[reg_.level_at(i, site)];
            w[i] = m * m;
        }
        probs.push_back(kernels::diagonal_expectation(data_.data(), dim(), w.data()));
    }
    return probs;
}

MeasureResult DensityMatrix::measure_condition(int site, int outcome, const Povm& povm) const {
    const PovmElement* el = nullptr;
    for (const auto& e : povm)
        if (e.outcome == outcome) el = &e;
    if (el == nullptr) throw std::invalid_argument("POVM has no such outcome");
    if (static_cast<int>(el->diag.size()) != reg_.dim_of(site))
        throw std::invalid_argument("POVM element dimension mismatch");

    std::vector<double> w(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
        const double m = el->diag[reg_.level_at(i, site)];
        w[i] = m * m;
    }
    MeasureResult res;
    res.probability = kernels::diagonal_expectation(data_.data(), dim(), w.data());
    if (res.probability < kBranchFloor) {
        res.probability = std::max(res.probability, 0.0);
        return res;
    }
    DensityMatrix cond = *this;
    std::vector<cplx> mw(dim());
    for (std::size_t i = 0; i < dim(); ++i)
        mw[i] = cplx(el->diag[reg_.level_at(i, site)], 0.0);
    kernels::apply_diagonal(cond.data_.data(), dim(), mw.data());
    cond.scale(1.0 / res.probability);
    res.state = std::move(cond);
    return res;
}

std::vector<cplx> site_operator(char token, int dim) {
    std::vector<cplx> op(static_cast<std::size_t>(dim) * dim, cplx(0.0, 0.0));
    switch (token) {
        case 'I':
            for (int i = 0; i < dim; ++i) op[i * dim + i] = 1.0;
            break;
        case 'X':
            op[0 * dim + 1] = 1.0;
            op[1 * dim + 0] = 1.0;
            break;
        case 'Y':
            op[0 * dim + 1] = cplx(0.0, -1.0);
            op[1 * dim + 0] = cplx(0.0, 1.0);
            break;
        case 'Z':
            op[0 * dim + 0] = 1.0;
            op[1 * dim + 1] = -1.0;
            break;
        case '2':
            if (dim < 3) break;  // leak projector vanishes on a qubit site
            op[2 * dim + 2] = 1.0;
            break;
        default:
            throw std::invalid_argument(std::string("unknown operator token: ") + token);
    }
    return op;
}

double DensityMatrix::expectation(const std::string& pauli_string) const {
    if (static_cast<int>(pauli_string.size()) != reg_.num_sites())
        throw std::invalid_argument("operator string length does not match register");
    std::vector<std::vector<cplx>> ops;
    std::vector<int> sites;
    for (int s = 0; s < reg_.num_sites(); ++s) {
        if (pauli_string[s] == 'I') continue;
        ops.push_back(site_operator(pauli_string[s], reg_.dim_of(s)));
        sites.push_back(s);
    }
    if (sites.empty()) return trace();
    const cplx val = expectation(ops, sites);
    if (std::abs(val.imag()) > 1e-10)
        throw std::invalid_argument("operator expectation is not real");
    return val.real();
}

cplx DensityMatrix::expectation(const std::vector<std::vector<cplx>>& site_ops,
                                const std::vector<int>& sites) const {
    if (site_ops.size() != sites.size())
        throw std::invalid_argument("operator/site count mismatch");
    // Hermiticity of the product operator
    for (std::size_t k = 0; k < site_ops.size(); ++k) {
        const int d = reg_.dim_of(sites[k]);
        if (static_cast<int>(site_ops[k].size()) != d * d)
            throw std::invalid_argument("site operator dimension mismatch");
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (std::abs(site_ops[k][i * d + j] - std::conj(site_ops[k][j * d + i])) > 1e-10)
                    throw std::invalid_argument("non-Hermitian site operator");
    }
    // Tr(rho O) = sum_{i,j} rho[i,j] O[j,i]; walk rows of O site by site.
    const std::size_t d = dim();
    cplx acc(0.0, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        // enumerate i with O[j,i] != 0 (product of per-site rows)
        std::vector<std::size_t> idx{j};
        std::vector<cplx> val{cplx(1.0, 0.0)};
        for (std::size_t k = 0; k < sites.size(); ++k) {
            const int site = sites[k];
            const int ds = reg_.dim_of(site);
            const int row = reg_.level_at(j, site);
            std::vector<std::size_t> nidx;
            std::vector<cplx> nval;
            for (int col = 0; col < ds; ++col) {
                const cplx o = site_ops[k][row * ds + col];
                if (std::abs(o) == 0.0) continue;
                const long long shift =
                    static_cast<long long>(col - row) * static_cast<long long>(reg_.stride(site));
                for (std::size_t t = 0; t < idx.size(); ++t) {
                    nidx.push_back(static_cast<std::size_t>(
                        static_cast<long long>(idx[t]) + shift));
                    nval.push_back(val[t] * o);
                }
            }
            idx = std::move(nidx);
            val = std::move(nval);
            if (idx.empty()) break;
        }
        for (std::size_t t = 0; t < idx.size(); ++t) acc += data_[idx[t] * d + j] * val[t];
    }
    return acc;
}

DensityMatrix DensityMatrix::partial_trace(const std::vector<int>& keep) const {
    if (keep.empty()) throw std::invalid_argument("keep set must be nonempty");
    std::vector<int> sorted = keep;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("duplicate site in keep set");
    std::vector<int> kdims;
    std::vector<std::string> klabels;
    for (int s : sorted) {
        kdims.push_back(reg_.dim_of(s));
        klabels.push_back(reg_.labels().at(s));
    }
    auto plan = kernels::make_embed_plan(reg_.dims(), sorted);
    DensityMatrix out(QuditRegister(kdims, klabels));
    const std::size_t m = plan.local_dim;
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
            cplx acc(0.0, 0.0);
            for (std::size_t r : plan.rest_offset)
                acc += data_[(r + plan.local_offset[a]) * dim() + (r + plan.local_offset[b])];
            out.data_[a * m + b] = acc;
        }
    return out;
}

double DensityMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) t += data_[i * dim() + i].real();
    return t;
}

double DensityMatrix::purity() const {
    double p = 0.0;
    for (const cplx& v : data_) p += std::norm(v);
    return p;
}

void DensityMatrix::renormalize() {
    const double t = trace();
    if (t <= 0.0) throw std::runtime_error("cannot renormalize zero-trace state");
    scale(1.0 / t);
}

void DensityMatrix::scale(double factor) {
    for (cplx& v : data_) v *= factor;
}

void DensityMatrix::mix(const DensityMatrix& other, double w) {
    if (!(reg_ == other.reg_)) throw std::invalid_argument("register mismatch in mix");
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] = (1.0 - w) * data_[i] + w * other.data_[i];
}

double DensityMatrix::hermiticity_error() const {
    double m = 0.0;
    for (std::size_t i = 0; i < dim(); ++i)
        for (std::size_t j = i; j < dim(); ++j)
            m = std::max(m, std::abs(data_[i * dim() + j] - std::conj(data_[j * dim() + i])));
    return m;
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::MatrixXcd mat(dim(), dim());
    for (std::size_t i = 0; i < dim(); ++i)
        for (std::size_t j = 0; j < dim(); ++j) mat(i, j) = data_[i * dim() + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mat, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double DensityMatrix::fidelity_with_pure(const std::vector<cplx>& amplitudes) const {
    if (amplitudes.size() != dim()) throw std::invalid_argument("target state length mismatch");
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < dim(); ++i) {
        cplx row(0.0, 0.0);
        for (std::size_t j = 0; j < dim(); ++j) row += data_[i * dim() + j] * amplitudes[j];
        acc += std::conj(amplitudes[i]) * row;
    }
    return acc.real();
}

}  // namespace s7sim
