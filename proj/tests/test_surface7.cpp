#include <cmath>

#include "gtest/gtest.h"
#include "s7sim/density_matrix.hpp"
#include "s7sim/surface7.hpp"
#include "test_util.hpp"

using namespace s7sim;
using namespace s7sim::surface7;

namespace {
constexpr double kPi = 3.14159265358979323846;

DensityMatrix pure4(const std::vector<cplx>& amps) {
    return DensityMatrix::from_pure(QuditRegister::qubits(4, kDataLabels), amps);
}

// product state of Eq-style preparation, straight amplitude arithmetic
std::vector<cplx> prep_product(double theta, double phi) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    std::vector<cplx> amps(16, cplx(0, 0));
    amps[0b0000] = c * c;
    amps[0b0010] = c * s * std::exp(cplx(0.0, phi));
    amps[0b1000] = s * c;
    amps[0b1010] = s * s * std::exp(cplx(0.0, phi));
    return amps;
}
}  // namespace

TEST(Surface7, LogicalBasisOrthonormalAndStabilized) {
    auto [zero, one] = logical_basis();
    cplx overlap(0, 0);
    double nz = 0, no = 0;
    for (int i = 0; i < 16; ++i) {
        overlap += std::conj(zero[i]) * one[i];
        nz += std::norm(zero[i]);
        no += std::norm(one[i]);
    }
    EXPECT_NEAR(std::abs(overlap), 0.0, 1e-15);
    EXPECT_NEAR(nz, 1.0, 1e-15);
    EXPECT_NEAR(no, 1.0, 1e-15);

    for (const auto& amps : {zero, one}) {
        DensityMatrix dm = pure4(amps);
        for (const auto& stab : stabilizers()) EXPECT_NEAR(dm.expectation(stab), 1.0, 1e-12);
    }
    DensityMatrix z = pure4(zero), o = pure4(one);
    EXPECT_NEAR(z.expectation("ZZII"), 1.0, 1e-12);
    EXPECT_NEAR(o.expectation("ZZII"), -1.0, 1e-12);
}

TEST(Surface7, ProjectorIdempotentRankTwo) {
    const auto& p = codespace_projector();
    // idempotence
    double diff = 0.0;
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) {
            cplx acc(0, 0);
            for (int k = 0; k < 16; ++k) acc += p[i * 16 + k] * p[k * 16 + j];
            diff = std::max(diff, std::abs(acc - p[i * 16 + j]));
        }
    EXPECT_LT(diff, 1e-12);
    cplx tr(0, 0);
    for (int i = 0; i < 16; ++i) tr += p[i * 16 + i];
    EXPECT_NEAR(tr.real(), 2.0, 1e-12);

    // action on |0000>: |0_L>/sqrt(2)
    auto [zero, one] = logical_basis();
    for (int i = 0; i < 16; ++i)
        EXPECT_NEAR(std::abs(p[i * 16 + 0] - zero[i] / std::sqrt(2.0)), 0.0, 1e-12);
}

TEST(Surface7, ProjectToCodespaceExamples) {
    auto [zero, one] = logical_basis();
    auto st = project_to_codespace(pure4(zero));
    EXPECT_NEAR(st.x, 0.0, 1e-12);
    EXPECT_NEAR(st.y, 0.0, 1e-12);
    EXPECT_NEAR(st.z, 1.0, 1e-12);
    EXPECT_NEAR(st.weight, 1.0, 1e-12);

    std::vector<cplx> comp(16, cplx(0, 0));
    comp[0] = 1.0;
    auto st2 = project_to_codespace(pure4(comp));
    EXPECT_NEAR(st2.z, 1.0, 1e-12);
    EXPECT_NEAR(st2.weight, 0.5, 1e-12);

    std::vector<cplx> mixed(256, cplx(0, 0));
    for (int i = 0; i < 16; ++i) mixed[i * 16 + i] = 1.0 / 16;
    auto st3 = project_to_codespace(
        DensityMatrix::from_matrix(QuditRegister::qubits(4, kDataLabels), mixed));
    EXPECT_NEAR(st3.x, 0.0, 1e-12);
    EXPECT_NEAR(st3.y, 0.0, 1e-12);
    EXPECT_NEAR(st3.z, 0.0, 1e-12);
    EXPECT_NEAR(st3.weight, 1.0 / 8, 1e-12);

    // a state fully outside the codespace signals a meaningless projection
    std::vector<cplx> outside(16, cplx(0, 0));
    outside[0b0001] = 1.0;
    EXPECT_THROW(project_to_codespace(pure4(outside)), std::runtime_error);
}

TEST(Surface7, LogicalFidelityExamples) {
    LogicalState plus{1.0, 0.0, 0.0, 1.0};
    EXPECT_NEAR(logical_fidelity(plus, 1, 0, 0), 1.0, 1e-12);
    LogicalState mixed{0.0, 0.0, 0.0, 1.0};
    EXPECT_NEAR(logical_fidelity(mixed, 0, 0, 1), 0.5, 1e-12);
    EXPECT_THROW(logical_fidelity(mixed, 0.5, 0, 0), std::invalid_argument);
}

TEST(Surface7, RepresentativesAgreeOnCodespace) {
    // random codespace states: all Z_L and X_L representatives coincide
    for (int k = 0; k < 8; ++k) {
        const double a = 0.3 + 0.8 * k, b = 0.2 * k;
        auto dm = pure4(logical_vector(std::cos(a / 2),
                                       std::sin(a / 2) * std::exp(cplx(0.0, b))));
        double zfirst = dm.expectation(logical_z_reps()[0]);
        for (const auto& rep : logical_z_reps())
            EXPECT_NEAR(dm.expectation(rep), zfirst, 1e-10);
        double xfirst = dm.expectation(logical_x_reps()[0]);
        for (const auto& rep : logical_x_reps())
            EXPECT_NEAR(dm.expectation(rep), xfirst, 1e-10);
    }
}

TEST(Surface7, ProductPrepProjectionClosure) {
    // exact projection of the product preparation matches the closed-form
    // projected state and probability over a grid of angles
    const auto& proj = codespace_projector();
    for (int it = 0; it < 17; ++it) {
        const double theta = kPi * it / 16.0;
        const double phi = 2 * kPi * ((it * 5) % 17) / 17.0;
        const auto amps = prep_product(theta, phi);
        // project amplitudes
        std::vector<cplx> papms(16, cplx(0, 0));
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j) papms[i] += proj[i * 16 + j] * amps[j];
        double norm2 = 0.0;
        for (const auto& v : papms) norm2 += std::norm(v);
        // squared norm of the projected state is the retention probability
        EXPECT_NEAR(norm2, projected_prep_probability(theta), 1e-12) << "theta=" << theta;
        const auto target = projected_prep_state(theta, phi);
        cplx fid(0, 0);
        for (int i = 0; i < 16; ++i) fid += std::conj(target[i]) * papms[i];
        EXPECT_NEAR(std::abs(fid) * std::abs(fid) / norm2, 1.0, 1e-10);
    }
}

TEST(Surface7, Weight1ErrorsDetectableWeight2LogicalsEnumerated) {
    // every weight-1 Pauli anticommutes with at least one stabilizer; the
    // weight-2 strings commuting with the whole set are exactly the logical
    // representatives (up to stabilizer multiplication for the Y pairs)
    const char paulis[] = {'I', 'X', 'Y', 'Z'};
    auto anticommutes = [](char a, char b) { return a != 'I' && b != 'I' && a != b; };
    auto commutes_with_all = [&](const std::string& err) {
        for (const auto& stab : stabilizers()) {
            int anti = 0;
            for (int s = 0; s < 4; ++s) anti ^= anticommutes(err[s], stab[s]) ? 1 : 0;
            if (anti) return false;
        }
        return true;
    };

    std::vector<std::string> undetectable;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    std::string err = {paulis[a], paulis[b], paulis[c], paulis[d]};
                    int weight = 0;
                    for (char ch : err) weight += ch != 'I';
                    if (weight == 0 || weight > 2) continue;
                    if (weight == 1) {
                        EXPECT_FALSE(commutes_with_all(err)) << err;
                        continue;
                    }
                    if (!commutes_with_all(err)) continue;
                    // stabilizers themselves are not logical errors
                    if (err == "ZIZI" || err == "IZIZ") continue;
                    undetectable.push_back(err);
                }
    const std::vector<std::string> expected = {"XIXI", "IXIX", "YIYI", "IYIY",
                                               "ZZII", "ZIIZ", "IZZI", "IIZZ"};
    EXPECT_EQ(undetectable.size(), expected.size());
    for (const auto& e : expected)
        EXPECT_NE(std::find(undetectable.begin(), undetectable.end(), e), undetectable.end())
            << e;
}
