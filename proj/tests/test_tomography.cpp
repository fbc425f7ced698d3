#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "s7sim/gates.hpp"
#include "s7sim/tomography.hpp"
#include "test_util.hpp"

using namespace s7sim;
using namespace s7sim::tomo;

namespace {
constexpr double kPi = 3.14159265358979323846;

// independent oracle: Frobenius projection of the linear-inversion matrix
// onto the density-matrix set via sort-based simplex projection of the
// eigenvalues (a different algorithm than the implementation path)
DensityMatrix simplex_oracle(const PauliVector& p) {
    DensityMatrix rho = linear_inversion(p);
    const int n = static_cast<int>(rho.dim());
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = rho.at(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    std::vector<double> lam(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::vector<double> sorted = lam;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double cum = 0.0, theta = 0.0;
    int k = 0;
    for (int i = 0; i < n; ++i) {
        cum += sorted[i];
        const double t = (cum - 1.0) / (i + 1);
        if (sorted[i] - t > 0.0) {
            k = i + 1;
            theta = t;
        }
    }
    (void)k;
    Eigen::VectorXd mu(n);
    for (int i = 0; i < n; ++i) mu(i) = std::max(lam[i] - theta, 0.0);
    Eigen::MatrixXcd out = es.eigenvectors() * mu.asDiagonal() * es.eigenvectors().adjoint();
    std::vector<cplx> flat(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) flat[i * n + j] = out(i, j);
    return DensityMatrix::from_matrix(QuditRegister::qubits(p.num_qubits), std::move(flat));
}

double frob_dist(const DensityMatrix& a, const DensityMatrix& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.elements().size(); ++i)
        s += std::norm(a.elements()[i] - b.elements()[i]);
    return std::sqrt(s);
}

PauliVector random_pauli_vector(int qubits, double scale, std::mt19937_64& rng) {
    PauliVector p;
    p.num_qubits = qubits;
    p.values.assign(1ull << (2 * qubits), 0.0);
    p.values[0] = 1.0;
    std::uniform_real_distribution<double> u(-scale, scale);
    for (std::size_t i = 1; i < p.values.size(); ++i) p.values[i] = u(rng);
    return p;
}

Ptm random_physical_ptm(std::mt19937_64& rng) {
    // random unitary mixed with depolarization
    auto u = testutil::random_unitary2(rng);
    std::array<cplx, 4> uarr = {u[0][0], u[0][1], u[1][0], u[1][1]};
    Ptm r = ptm_from_unitary(uarr);
    std::uniform_real_distribution<double> dp(0.0, 1.0);
    const double p = dp(rng);
    for (int i = 1; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.at(i, j) *= 1.0 - p;
    return r;
}
}  // namespace

TEST(Tomography, PauliVectorExamples) {
    DensityMatrix zero(QuditRegister::qubits(1), {0});
    auto p = measure_pauli_vector(zero);
    EXPECT_NEAR(p.values[0], 1.0, 1e-14);  // I
    EXPECT_NEAR(p.values[1], 0.0, 1e-14);  // X
    EXPECT_NEAR(p.values[2], 0.0, 1e-14);  // Y
    EXPECT_NEAR(p.values[3], 1.0, 1e-14);  // Z
    EXPECT_EQ(PauliVector::label(0b0111, 2), "XZ");
    EXPECT_EQ(PauliVector::label(0, 4), "IIII");

    // logical basis state: all three stabilizers at +1
    auto [zl, ol] = surface7::logical_basis();
    DensityMatrix dm = DensityMatrix::from_pure(
        QuditRegister::qubits(4, surface7::kDataLabels), zl);
    auto p4 = measure_pauli_vector(dm);
    auto idx = [](const std::string& label) {
        int v = 0;
        for (char c : label) v = 4 * v + (c == 'I' ? 0 : c == 'X' ? 1 : c == 'Y' ? 2 : 3);
        return v;
    };
    EXPECT_NEAR(p4.values[idx("ZIZI")], 1.0, 1e-12);
    EXPECT_NEAR(p4.values[idx("XXXX")], 1.0, 1e-12);
    EXPECT_NEAR(p4.values[idx("IZIZ")], 1.0, 1e-12);
}

TEST(Tomography, LinearInversionRoundTrip) {
    std::mt19937_64 rng(31);
    auto rho = testutil::random_density(4, rng);
    std::vector<cplx> flat;
    for (const auto& row : rho)
        for (const auto& v : row) flat.push_back(v);
    DensityMatrix dm = DensityMatrix::from_matrix(QuditRegister::qubits(2), flat);
    auto p = measure_pauli_vector(dm);
    auto back = linear_inversion(p);
    EXPECT_LT(frob_dist(dm, back), 1e-12);
}

TEST(Tomography, MlePhysicalInputIsFixedPoint) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        auto rho = testutil::random_density(4, rng);
        std::vector<cplx> flat;
        for (const auto& row : rho)
            for (const auto& v : row) flat.push_back(v);
        DensityMatrix dm = DensityMatrix::from_matrix(QuditRegister::qubits(2), flat);
        auto res = mle_state(measure_pauli_vector(dm));
        EXPECT_LT(frob_dist(dm, res.state), 1e-6);
        EXPECT_LT(res.cost, 1e-12);
        EXPECT_LT(res.stationarity, 1e-8);
    }
}

TEST(Tomography, MleBlochBallProjection) {
    // p = (1,1,1,1): nearest physical state has Bloch vector (1,1,1)/sqrt(3),
    // confirmed against a brute-force grid search over the Bloch ball
    PauliVector p;
    p.num_qubits = 1;
    p.values = {1.0, 1.0, 1.0, 1.0};
    auto res = mle_state(p);
    const double want = 1.0 / std::sqrt(3.0);
    EXPECT_NEAR(res.state.expectation("X"), want, 1e-9);
    EXPECT_NEAR(res.state.expectation("Y"), want, 1e-9);
    EXPECT_NEAR(res.state.expectation("Z"), want, 1e-9);

    double best_cost = 1e300;
    double bx = 0, by = 0, bz = 0;
    const int g = 20;
    for (int i = -g; i <= g; ++i)
        for (int j = -g; j <= g; ++j)
            for (int k = -g; k <= g; ++k) {
                const double x = i / double(g), y = j / double(g), z = k / double(g);
                if (x * x + y * y + z * z > 1.0) continue;
                const double c =
                    (1 - x) * (1 - x) + (1 - y) * (1 - y) + (1 - z) * (1 - z);
                if (c < best_cost) {
                    best_cost = c;
                    bx = x;
                    by = y;
                    bz = z;
                }
            }
    EXPECT_NEAR(res.state.expectation("X"), bx, 0.06);
    EXPECT_NEAR(res.state.expectation("Y"), by, 0.06);
    EXPECT_NEAR(res.state.expectation("Z"), bz, 0.06);
}

TEST(Tomography, MleMatchesSimplexOracle) {
    std::mt19937_64 rng(91);
    for (int trial = 0; trial < 50; ++trial) {
        auto p = random_pauli_vector(1, 1.2, rng);
        auto res = mle_state(p);
        auto oracle = simplex_oracle(p);
        EXPECT_LT(frob_dist(res.state, oracle), 1e-4);
        EXPECT_LT(res.stationarity, 1e-8);
    }
    for (int trial = 0; trial < 10; ++trial) {
        auto p = random_pauli_vector(2, 0.6, rng);
        auto res = mle_state(p);
        auto oracle = simplex_oracle(p);
        EXPECT_LT(frob_dist(res.state, oracle), 1e-4);
    }
}

TEST(Tomography, MleIdempotent) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        auto p = random_pauli_vector(1, 1.5, rng);
        auto first = mle_state(p);
        auto second = mle_state(measure_pauli_vector(first.state));
        EXPECT_LT(frob_dist(first.state, second.state), 1e-8);
    }
}

TEST(Tomography, MleFlippedStabilizer) {
    // flip one stabilizer sign on the logical-zero expectations: output stays
    // physical with reduced codespace weight
    auto [zl, ol] = surface7::logical_basis();
    DensityMatrix dm = DensityMatrix::from_pure(
        QuditRegister::qubits(4, surface7::kDataLabels), zl);
    auto p = measure_pauli_vector(dm);
    int idx = 0;
    for (char c : std::string("ZIZI")) idx = 4 * idx + (c == 'I' ? 0 : 3);
    p.values[idx] = -1.0;
    auto res = mle_state(p);
    EXPECT_GT(res.state.min_eigenvalue(), -1e-10);
    EXPECT_NEAR(res.state.trace(), 1.0, 1e-10);
    auto logical = surface7::project_to_codespace(res.state);
    EXPECT_LT(logical.weight, 1.0 - 1e-3);
}

TEST(Tomography, PtmBasics) {
    auto rz = ptm_from_unitary({1.0, 0.0, 0.0, std::exp(cplx(0.0, kPi / 4))});
    // T gate: X -> (X+Y)/sqrt(2), Z -> Z
    EXPECT_NEAR(rz.at(1, 1), std::cos(kPi / 4), 1e-12);
    EXPECT_NEAR(rz.at(2, 1), std::sin(kPi / 4), 1e-12);
    EXPECT_NEAR(rz.at(3, 3), 1.0, 1e-12);
    EXPECT_NEAR(rz.at(0, 0), 1.0, 1e-12);

    EXPECT_NEAR(avg_gate_fidelity(rz, rz), 1.0, 1e-12);
    EXPECT_NEAR(avg_gate_fidelity(Ptm::identity(), rz), (2.0 + std::sqrt(2.0) + 2.0) / 6.0,
                1e-12);
    Ptm depol;
    depol.at(0, 0) = 1.0;
    EXPECT_NEAR(avg_gate_fidelity(depol, Ptm::identity()), 0.5, 1e-12);
    Ptm bad = Ptm::identity();
    bad.at(0, 1) = 0.2;
    EXPECT_THROW(avg_gate_fidelity(bad, Ptm::identity()), std::invalid_argument);
}

TEST(Tomography, ChoiRoundTripAndTpcp) {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 100; ++trial) {
        Ptm r = random_physical_ptm(rng);
        Ptm back = ptm_from_choi(choi_from_ptm(r));
        double diff = 0.0;
        for (int i = 0; i < 16; ++i) diff = std::max(diff, std::abs(r.r[i] - back.r[i]));
        EXPECT_LT(diff, 1e-12);
        EXPECT_GT(choi_min_eigenvalue(choi_from_ptm(r)), -1e-10);
    }
}

TEST(Tomography, TpcpProjectExamples) {
    // already-physical maps are fixed points
    auto u = ptm_from_unitary({std::cos(0.4), cplx(0, -std::sin(0.4)),
                               cplx(0, -std::sin(0.4)), std::cos(0.4)});
    auto res = tpcp_project(u);
    double diff = 0.0;
    for (int i = 0; i < 16; ++i) diff = std::max(diff, std::abs(res.ptm.r[i] - u.r[i]));
    EXPECT_LT(diff, 1e-8);

    // inflated rotation block projects back to a physical map
    Ptm inflated = u;
    for (int i = 1; i < 4; ++i)
        for (int j = 0; j < 4; ++j) inflated.at(i, j) *= 1.5;
    auto proj = tpcp_project(inflated);
    EXPECT_GT(proj.choi_eigenvalue_floor, -1e-9);
    EXPECT_LT(proj.tp_residual, 1e-8);

    // complete depolarization is physical
    Ptm depol;
    depol.at(0, 0) = 1.0;
    auto dres = tpcp_project(depol);
    for (int i = 0; i < 16; ++i) EXPECT_NEAR(dres.ptm.r[i], depol.r[i], 1e-9);
}

TEST(Tomography, TpcpIdempotentAndNonExpansive) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 5; ++trial) {
        Ptm a = random_physical_ptm(rng);
        Ptm b = random_physical_ptm(rng);
        // inflate both off the physical set
        for (int i = 1; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                a.at(i, j) *= 1.4;
                b.at(i, j) *= 1.3;
            }
        auto pa = tpcp_project(a), pb = tpcp_project(b);
        auto paa = tpcp_project(pa.ptm);
        double diff = 0.0;
        for (int i = 0; i < 16; ++i)
            diff = std::max(diff, std::abs(pa.ptm.r[i] - paa.ptm.r[i]));
        EXPECT_LT(diff, 1e-7);

        // non-expansive in Choi Frobenius norm
        auto ca = choi_from_ptm(a), cb = choi_from_ptm(b);
        auto cpa = choi_from_ptm(pa.ptm), cpb = choi_from_ptm(pb.ptm);
        double before = 0.0, after = 0.0;
        for (int i = 0; i < 16; ++i) {
            before += std::norm(ca[i] - cb[i]);
            after += std::norm(cpa[i] - cpb[i]);
        }
        EXPECT_LE(std::sqrt(after), std::sqrt(before) + 1e-9);
    }
}

TEST(Tomography, LptmInversionExamples) {
    std::vector<std::array<double, 4>> cardinals = {
        {1, 0, 0, 1}, {1, 0, 0, -1}, {1, 1, 0, 0}, {1, -1, 0, 0}, {1, 0, 1, 0}, {1, 0, -1, 0}};
    auto ident = lptm_inversion(cardinals, cardinals);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            EXPECT_NEAR(ident.at(i, j), i == j ? 1.0 : 0.0, 1e-10);

    // ideal T mapping of the cardinal states
    auto t = ptm_from_unitary({1.0, 0.0, 0.0, std::exp(cplx(0.0, kPi / 4))});
    std::vector<std::array<double, 4>> outs;
    for (const auto& c : cardinals) outs.push_back(t.apply(c));
    auto fit = lptm_inversion(cardinals, outs);
    for (int i = 0; i < 16; ++i) EXPECT_NEAR(fit.r[i], t.r[i], 1e-10);

    // depolarized outputs
    std::vector<std::array<double, 4>> zeros(6, {1, 0, 0, 0});
    auto dep = lptm_inversion(cardinals, zeros);
    EXPECT_NEAR(dep.at(0, 0), 1.0, 1e-10);
    for (int i = 1; i < 4; ++i)
        for (int j = 0; j < 4; ++j) EXPECT_NEAR(dep.at(i, j), 0.0, 1e-10);

    // rank-deficient inputs rejected
    std::vector<std::array<double, 4>> flat(5, {1, 0, 0, 1});
    EXPECT_THROW(lptm_inversion(flat, flat), std::invalid_argument);
}

TEST(Tomography, QubitRestrictTracksWeight) {
    // qutrit state with 10% leaked population
    QuditRegister reg({3}, {"q"});
    std::vector<cplx> m(9, cplx(0, 0));
    m[0] = 0.6;
    m[4] = 0.3;
    m[8] = 0.1;
    auto dm = DensityMatrix::from_matrix(reg, m);
    auto [qubit, weight] = qubit_restrict(dm);
    EXPECT_NEAR(weight, 0.9, 1e-12);
    EXPECT_NEAR(qubit.at(0, 0).real(), 0.6 / 0.9, 1e-12);
    EXPECT_NEAR(qubit.trace(), 1.0, 1e-12);
}
