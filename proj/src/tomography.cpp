#include "s7sim/tomography.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "s7sim/executor.hpp"

namespace s7sim::tomo {

namespace {
constexpr int kMaxIter = 10000;
constexpr double kConvTol = 1e-10;
constexpr char kPauliTokens[] = "IXYZ";
}  // namespace

std::string PauliVector::label(int index, int num_qubits) {
    std::string s(num_qubits, 'I');
    for (int q = num_qubits - 1; q >= 0; --q) {
        s[q] = kPauliTokens[index & 3];
        index >>= 2;
    }
    return s;
}

PauliVector measure_pauli_vector(const DensityMatrix& dm) {
    const int k = dm.reg().num_sites();
    for (int s = 0; s < k; ++s)
        if (dm.reg().dim_of(s) != 2)
            throw std::invalid_argument("Pauli tomography needs an all-qubit register");
    PauliVector p;
    p.num_qubits = k;
    const int n = 1 << (2 * k);
    p.values.resize(n);
    for (int i = 0; i < n; ++i) p.values[i] = dm.expectation(PauliVector::label(i, k));
    return p;
}

PauliVector sample_pauli_vector(const DensityMatrix& dm, long shots, std::uint64_t seed) {
    if (shots <= 0) throw std::invalid_argument("shot count must be positive");
    PauliVector p = measure_pauli_vector(dm);
    p.shots = shots;
    p.errors.assign(p.values.size(), 0.0);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 1; i < p.values.size(); ++i) {
        const double prob = std::clamp(0.5 * (1.0 + p.values[i]), 0.0, 1.0);
        std::binomial_distribution<long> bin(shots, prob);
        const double est = 2.0 * static_cast<double>(bin(rng)) / shots - 1.0;
        p.values[i] = est;
        p.errors[i] = std::sqrt(std::max(1.0 - est * est, 0.0) / shots);
    }
    return p;
}

DensityMatrix linear_inversion(const PauliVector& p) {
    const int k = p.num_qubits;
    const std::size_t dim = 1ull << k;
    if (p.values.size() != (1ull << (2 * k)))
        throw std::invalid_argument("Pauli vector length mismatch");
    if (std::abs(p.values[0] - 1.0) > 1e-9)
        throw std::invalid_argument("identity component of the Pauli vector must be 1");
    std::vector<cplx> rho(dim * dim, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        if (p.values[i] == 0.0) continue;
        // walk the single nonzero per column of the Pauli string
        const std::string tokens = PauliVector::label(static_cast<int>(i), k);
        for (std::size_t col = 0; col < dim; ++col) {
            std::size_t row = col;
            cplx val(1.0, 0.0);
            for (int s = 0; s < k; ++s) {
                const int bit = (col >> (k - 1 - s)) & 1;
                switch (tokens[s]) {
                    case 'I': break;
                    case 'Z': val *= bit ? -1.0 : 1.0; break;
                    case 'X': row ^= 1ull << (k - 1 - s); break;
                    case 'Y':
                        row ^= 1ull << (k - 1 - s);
                        val *= bit ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
                        break;
                }
            }
            rho[row * dim + col] += p.values[i] * val / static_cast<double>(dim);
        }
    }
    QuditRegister reg = QuditRegister::qubits(k);
    return DensityMatrix::from_matrix(std::move(reg), std::move(rho));
}

std::pair<DensityMatrix, double> qubit_restrict(const DensityMatrix& dm) {
    const auto& reg = dm.reg();
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < reg.total_dim(); ++i) {
        bool ok = true;
        for (int s = 0; s < reg.num_sites() && ok; ++s) ok = reg.level_at(i, s) <= 1;
        if (ok) kept.push_back(i);
    }
    QuditRegister qreg(std::vector<int>(reg.num_sites(), 2), reg.labels());
    std::vector<cplx> out(kept.size() * kept.size());
    double weight = 0.0;
    for (std::size_t a = 0; a < kept.size(); ++a) {
        weight += dm.at(kept[a], kept[a]).real();
        for (std::size_t b = 0; b < kept.size(); ++b) out[a * kept.size() + b] = dm.at(kept[a], kept[b]);
    }
    if (weight <= 1e-14) throw std::runtime_error("state has no qubit-subspace weight");
    for (auto& v : out) v /= weight;
    return {DensityMatrix::from_matrix(std::move(qreg), std::move(out)), weight};
}

MleResult mle_state(const PauliVector& p) {
    DensityMatrix rho_star = linear_inversion(p);
    const std::size_t dim = rho_star.dim();

    Eigen::MatrixXcd m(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) m(i, j) = rho_star.at(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    Eigen::VectorXd lam = es.eigenvalues();

    // Both constraint projections are diagonal in the eigenbasis of the
    // inversion, so the alternating projections reduce to the eigenvalue
    // vector: clip against the PSD cone, re-shift onto the trace-one plane,
    // with Dykstra corrections so the limit is the true projection.
    Eigen::VectorXd x = lam, pcorr = Eigen::VectorXd::Zero(dim), qcorr = Eigen::VectorXd::Zero(dim);
    MleResult res{rho_star, 0.0, 0.0, 0, false};
    for (int it = 0; it < kMaxIter; ++it) {
        Eigen::VectorXd y = (x + pcorr).cwiseMax(0.0);
        pcorr = x + pcorr - y;
        Eigen::VectorXd z = y + qcorr;
        z.array() += (1.0 - z.sum()) / static_cast<double>(dim);
        qcorr = y + qcorr - z;
        const double delta = (z - x).norm();
        x = z;
        res.iterations = it + 1;
        if (delta < kConvTol && x.minCoeff() > -kConvTol) {
            res.converged = true;
            break;
        }
    }
    Eigen::VectorXd mu = x.cwiseMax(0.0);
    mu.array() += (1.0 - mu.sum()) / static_cast<double>(dim);
    if (mu.minCoeff() < 0.0) mu = mu.cwiseMax(0.0);  // last resort, off by < tol

    Eigen::MatrixXcd out = es.eigenvectors() * mu.asDiagonal() *
                           es.eigenvectors().adjoint();
    std::vector<cplx> elems(dim * dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) elems[i * dim + j] = out(i, j);
    res.state = DensityMatrix::from_matrix(QuditRegister::qubits(p.num_qubits), std::move(elems));

    const double scale = static_cast<double>(dim);
    res.cost = scale * (mu - lam).squaredNorm();
    // first-order optimality: min over density matrices of <rho-hat - rho*, .>
    // is attained at the smallest eigenvalue of the gradient direction
    const Eigen::VectorXd g = mu - lam;
    const double inner = g.dot(mu);
    res.stationarity = std::max(0.0, inner - g.minCoeff());
    if (!res.converged && res.stationarity > 1e-8)
        throw std::runtime_error("state reconstruction did not converge; residual " +
                                 std::to_string(res.stationarity));
    return res;
}

std::array<double, 4> Ptm::apply(const std::array<double, 4>& p) const {
    std::array<double, 4> out{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out[i] += at(i, j) * p[j];
    return out;
}

Ptm Ptm::identity() {
    Ptm r;
    for (int i = 0; i < 4; ++i) r.at(i, i) = 1.0;
    return r;
}

namespace {
const std::array<std::array<cplx, 4>, 4>& pauli2() {
    static const std::array<std::array<cplx, 4>, 4> p = {{
        {cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(1, 0)},
        {cplx(0, 0), cplx(1, 0), cplx(1, 0), cplx(0, 0)},
        {cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0)},
        {cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(-1, 0)},
    }};
    return p;
}

std::array<cplx, 4> mul2(const std::array<cplx, 4>& a, const std::array<cplx, 4>& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

cplx tr2(const std::array<cplx, 4>& a) { return a[0] + a[3]; }

std::array<cplx, 4> dag2(const std::array<cplx, 4>& a) {
    return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])};
}
}  // namespace

Ptm ptm_from_unitary(const std::array<cplx, 4>& u) {
    Ptm r;
    const auto ud = dag2(u);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            r.at(i, j) = 0.5 * tr2(mul2(pauli2()[i], mul2(u, mul2(pauli2()[j], ud)))).real();
    return r;
}

std::array<cplx, 16> choi_from_ptm(const Ptm& r) {
    std::array<cplx, 16> c{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (r.at(i, j) == 0.0) continue;
            const auto& si = pauli2()[i];
            const auto& sj = pauli2()[j];
            // sigma_i (x) sigma_j^T, first factor the output copy
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (int cidx = 0; cidx < 2; ++cidx)
                        for (int d = 0; d < 2; ++d)
                            c[(a * 2 + cidx) * 4 + (b * 2 + d)] +=
                                0.25 * r.at(i, j) * si[a * 2 + b] * sj[d * 2 + cidx];
        }
    return c;
}

Ptm ptm_from_choi(const std::array<cplx, 16>& c) {
    Ptm r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const auto& si = pauli2()[i];
            const auto& sj = pauli2()[j];
            cplx acc(0.0, 0.0);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (int cidx = 0; cidx < 2; ++cidx)
                        for (int d = 0; d < 2; ++d)
                            acc += c[(a * 2 + cidx) * 4 + (b * 2 + d)] *
                                   std::conj(si[a * 2 + b] * sj[d * 2 + cidx]);
            r.at(i, j) = acc.real();
        }
    return r;
}

double choi_min_eigenvalue(const std::array<cplx, 16>& c) {
    Eigen::Matrix4cd m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = c[i * 4 + j];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

namespace {
Eigen::Matrix4cd project_partial_trace(const Eigen::Matrix4cd& c) {
    // pin the output-traced 2x2 block sum: Tr_1 C = I/2
    Eigen::Matrix2cd t = Eigen::Matrix2cd::Zero();
    for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) t(i, j) += c(a * 2 + i, a * 2 + j);
    Eigen::Matrix2cd delta = t - 0.5 * Eigen::Matrix2cd::Identity();
    Eigen::Matrix4cd out = c;
    for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) out(a * 2 + i, a * 2 + j) -= 0.5 * delta(i, j);
    return out;
}

double partial_trace_residual(const Eigen::Matrix4cd& c) {
    Eigen::Matrix2cd t = Eigen::Matrix2cd::Zero();
    for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) t(i, j) += c(a * 2 + i, a * 2 + j);
    return (t - 0.5 * Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
}
}  // namespace

TpcpResult tpcp_project(const Ptm& r) {
    const auto c0 = choi_from_ptm(r);
    Eigen::Matrix4cd x;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) x(i, j) = c0[i * 4 + j];
    x = 0.5 * (x + x.adjoint().eval());

    Eigen::Matrix4cd p = Eigen::Matrix4cd::Zero();
    TpcpResult res;
    for (int it = 0; it < kMaxIter; ++it) {
        // PSD projection with Dykstra correction, then the affine constraint
        Eigen::Matrix4cd xp = x + p;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(xp);
        Eigen::Vector4d clipped = es.eigenvalues().cwiseMax(0.0);
        Eigen::Matrix4cd y =
            es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
        p = xp - y;
        Eigen::Matrix4cd z = project_partial_trace(y);
        const double delta = (z - x).cwiseAbs().maxCoeff();
        x = z;
        res.iterations = it + 1;
        if (delta < kConvTol) {
            res.converged = true;
            break;
        }
    }
    std::array<cplx, 16> cout{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) cout[i * 4 + j] = x(i, j);
    res.ptm = ptm_from_choi(cout);
    res.choi_eigenvalue_floor = choi_min_eigenvalue(cout);
    res.tp_residual = partial_trace_residual(x);
    if (!res.converged)
        throw std::runtime_error("map projection did not converge");
    return res;
}

double avg_gate_fidelity(const Ptm& r, const Ptm& ideal) {
    for (const Ptm* m : {&r, &ideal}) {
        if (std::abs(m->at(0, 0) - 1.0) > 1e-6 || std::abs(m->at(0, 1)) > 1e-6 ||
            std::abs(m->at(0, 2)) > 1e-6 || std::abs(m->at(0, 3)) > 1e-6)
            throw std::invalid_argument("transfer matrix is not trace preserving");
    }
    double tr = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) tr += ideal.at(i, j) * r.at(i, j);
    return (tr + 2.0) / 6.0;
}

Ptm lptm_inversion(const std::vector<std::array<double, 4>>& inputs,
                   const std::vector<std::array<double, 4>>& outputs) {
    if (inputs.size() != outputs.size() || inputs.size() < 4)
        throw std::invalid_argument("need at least four matched input/output states");
    const int n = static_cast<int>(inputs.size());
    Eigen::MatrixXd pin(4, n), pout(4, n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < 4; ++i) {
            pin(i, k) = inputs[k][i];
            pout(i, k) = outputs[k][i];
        }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(pin.transpose(),
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues().minCoeff() < 1e-10 * svd.singularValues().maxCoeff())
        throw std::invalid_argument("input states are rank deficient");
    // row i of R solves min || P_in^T x - (row i of P_out)^T ||
    Eigen::MatrixXd rt = svd.solve(pout.transpose());
    Ptm r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.at(i, j) = rt(j, i);
    return r;
}

ProcessTomographyResult logical_process_tomography(const circuits::LogicalGateSpec& gate,
                                                   const noise::NoiseModel& model,
                                                   circuits::Scheme scheme) {
    using namespace circuits;
    ProcessTomographyResult result;
    result.ideal = ptm_from_unitary(build_logical_gate(gate).ideal_unitary);

    const exec::Runner runner(model);
    const std::vector<int> data_sites = {0, 1, 2, 3};

    struct CardinalPrep {
        const char* name;
        PrepAngles angles;
    };
    const double pi = 3.14159265358979323846;
    const std::vector<CardinalPrep> preps = {
        {"0L", {0.0, 0.0}},      {"1L", {pi, 0.0}},        {"+L", {pi / 2, 0.0}},
        {"-L", {pi / 2, pi}},    {"+iL", {pi / 2, pi / 2}}, {"-iL", {pi / 2, 3 * pi / 2}},
    };

    auto characterize = [&](const DensityMatrix& full) {
        DensityMatrix data = full.partial_trace(data_sites);
        auto [qubits, weight] = qubit_restrict(data);
        (void)weight;
        const PauliVector pv = measure_pauli_vector(qubits);
        const MleResult mle = mle_state(pv);
        const auto logical = surface7::project_to_codespace(mle.state);
        return std::array<double, 4>{1.0, logical.x, logical.y, logical.z};
    };

    for (const auto& prep : preps) {
        // input side: preparation plus one stabilizer round
        TimedCircuit input_circuit = build_prep(prep.angles);
        input_circuit.cycle_period_ns =
            scheme == Scheme::pipelined ? kPipelinedPeriodNs : kParallelPeriodNs;
        append_cycle(input_circuit, scheme, 0, kSingleQubitNs);
        input_circuit.validate();
        auto input_run = runner.run(input_circuit);
        if (input_run.zero_branch) throw std::runtime_error("input preparation branch vanished");
        result.inputs.push_back(characterize(*input_run.state));

        // output side: the same preparation, the gate, and a detection round
        TimedCircuit output_circuit = build_prep(prep.angles);
        output_circuit.cycle_period_ns = input_circuit.cycle_period_ns;
        append_cycle(output_circuit, scheme, 0, kSingleQubitNs);
        const double round_end = output_circuit.total_duration_ns();
        GateCircuit g = build_logical_gate(gate, round_end);
        for (auto& ins : g.circuit.instructions) output_circuit.append(std::move(ins));
        const double gate_end = output_circuit.total_duration_ns();
        append_cycle(output_circuit, scheme, 1, gate_end);
        output_circuit.validate();
        auto output_run = runner.run(output_circuit);
        if (output_run.zero_branch) throw std::runtime_error("gate output branch vanished");
        result.outputs.push_back(characterize(*output_run.state));
        result.retained_probability.push_back(output_run.branch_probability);
    }

    result.raw = lptm_inversion(result.inputs, result.outputs);
    TpcpResult proj = tpcp_project(result.raw);
    result.physical = proj.ptm;
    result.fidelity = avg_gate_fidelity(result.physical, result.ideal);
    return result;
}

std::string ptm_to_csv(const Ptm& r) {
    std::ostringstream out;
    out << "row";
    for (int j = 0; j < 4; ++j) out << ',' << "IXYZ"[j];
    out << '\n';
    for (int i = 0; i < 4; ++i) {
        out << "IXYZ"[i];
        char buf[32];
        for (int j = 0; j < 4; ++j) {
            std::snprintf(buf, sizeof(buf), ",%.12g", r.at(i, j));
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace s7sim::tomo
