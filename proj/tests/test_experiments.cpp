#include <cmath>

#include "gtest/gtest.h"
#include "s7sim/calibration.hpp"
#include "s7sim/experiments.hpp"
#include "s7sim/io.hpp"

using namespace s7sim;
using namespace s7sim::expt;
using circuits::LogicalBasis;
using circuits::Scheme;

namespace {
constexpr double kPi = 3.14159265358979323846;

noise::DeviceParams table_params() {
    return noise::DeviceParams::from_json_file(std::string(TEST_DATA_DIR) +
                                               "/../../data/device_params.json");
}

noise::NoiseModel ideal(int level = 0) {
    return noise::NoiseModel::make(level, noise::DeviceParams::ideal());
}
}  // namespace

TEST(Experiments, DetectionModelZero) {
    // theta = 0: only the preparation factor survives, at every depth
    for (int n : {1, 3, 5}) {
        auto rec = run_detection({0.0, 0.0}, Scheme::pipelined, n, ideal());
        EXPECT_NEAR(rec.retained_fraction, 0.5, 1e-9) << n;
        EXPECT_NEAR(rec.assembly_logical_value, 1.0, 1e-9);
        EXPECT_NEAR(rec.op_z, 1.0, 1e-9);
    }
    // theta = pi/2: Eq-of-motion factor 1/4
    auto rec = run_detection({kPi / 2, 0.0}, Scheme::pipelined, 1, ideal(), LogicalBasis::X);
    EXPECT_NEAR(rec.retained_fraction, 0.25, 1e-9);
    EXPECT_NEAR(rec.assembly_logical_value, 1.0, 1e-9);
}

TEST(Experiments, DetectionDecaysLogLinearly) {
    // uniform T1 with T2 = 2 T1: retention decays close to exponentially
    noise::DeviceParams dev = noise::DeviceParams::ideal();
    for (auto& t : dev.transmons) {
        t.t1 = 30e-6;
        t.t2_star = 60e-6;
        t.t2_echo = 60e-6;
    }
    const auto model = noise::NoiseModel::make(1, dev);
    std::vector<double> ns, ps;
    double prev = 1.0;
    for (int n = 1; n <= 8; ++n) {
        auto rec = run_detection({0.0, 0.0}, Scheme::pipelined, n, model);
        EXPECT_LT(rec.retained_fraction, prev);
        prev = rec.retained_fraction;
        ns.push_back(n);
        ps.push_back(rec.retained_fraction);
    }
    auto fit = calib::fit_detection_rate(ns, ps);
    EXPECT_GT(fit.gamma, 0.0);
    EXPECT_LT(fit.residual, 1e-3);
}

TEST(Experiments, CardinalInitNoiseless) {
    auto rows = run_cardinal_init_suite(ideal(), Scheme::pipelined);
    ASSERT_EQ(rows.size(), 6u);
    for (const auto& r : rows) {
        EXPECT_NEAR(r.f4q, 1.0, 1e-9) << r.state << "/" << r.variant;
        EXPECT_NEAR(r.fl, 1.0, 1e-9);
    }
    // retention: 1/2 for the polar preparations, 1/4 for the equatorial ones
    EXPECT_NEAR(rows[0].retained, 0.5, 1e-9);
    EXPECT_NEAR(rows[2].retained, 0.25, 1e-9);
    EXPECT_NEAR(rows[4].retained, 0.25, 1e-9);
}

TEST(Experiments, CardinalInitLogicalBeatsPhysical) {
    // detected weight-1 errors: the projected logical fidelity strictly
    // exceeds the raw four-qubit fidelity for every cardinal state
    const auto model = noise::NoiseModel::make(1, table_params());
    auto rows = run_cardinal_init_suite(model, Scheme::pipelined);
    for (const auto& r : rows) {
        EXPECT_GT(r.fl, r.f4q) << r.state << "/" << r.variant;
        EXPECT_GT(r.fl, 0.98) << r.state;
    }
    // fault-tolerant preparations do at least as well logically
    double fl_nonft_plus = 0, fl_ft_plus = 0, fl_nonft_minus = 0, fl_ft_minus = 0;
    for (const auto& r : rows) {
        if (r.state == "+L") (r.variant == "ft" ? fl_ft_plus : fl_nonft_plus) = r.fl;
        if (r.state == "-L") (r.variant == "ft" ? fl_ft_minus : fl_nonft_minus) = r.fl;
    }
    EXPECT_GE(fl_ft_plus, fl_nonft_plus - 1e-9);
    EXPECT_GE(fl_ft_minus, fl_nonft_minus - 1e-9);
}

TEST(Experiments, NoiselessSweeps) {
    auto eq = run_logical_measurement_sweep(true, 9, ideal(), Scheme::pipelined);
    for (const auto& pt : eq.points) {
        EXPECT_NEAR(pt.xl, std::cos(pt.angle), 1e-9);
        EXPECT_NEAR(pt.yl, std::sin(pt.angle), 1e-9);
        EXPECT_NEAR(pt.zl, 0.0, 1e-9);
        EXPECT_NEAR(pt.p_xl, 0.25, 1e-9);
        EXPECT_NEAR(pt.p_yl, 0.25, 1e-9);
        EXPECT_NEAR(pt.fl, 1.0, 1e-9);
    }
    EXPECT_NEAR(eq.amp_xl, 1.0, 1e-9);
    EXPECT_NEAR(eq.amp_yl, 1.0, 1e-9);
    EXPECT_NEAR(eq.flr(eq.amp_xl), 1.0, 1e-9);

    auto pol = run_logical_measurement_sweep(false, 9, ideal(), Scheme::pipelined);
    for (const auto& pt : pol.points) {
        EXPECT_NEAR(pt.p_zl, surface7::projected_prep_probability(pt.angle), 1e-9);
        const double c2 = std::cos(pt.angle / 2) * std::cos(pt.angle / 2);
        const double s2 = 1.0 - c2;
        const double norm = c2 * c2 + s2 * s2;
        EXPECT_NEAR(pt.zl, (c2 * c2 - s2 * s2) / norm, 1e-9);
        EXPECT_NEAR(pt.xl, 2.0 * c2 * s2 / norm, 1e-9);
    }
    EXPECT_NEAR(pol.amp_zl, 1.0, 1e-9);
    EXPECT_NEAR(pol.amp_xl, 1.0, 1e-9);
}

TEST(Experiments, YMeasurementRetainsMoreUnderNoise) {
    // one weight-2 check discards less than the full assemblies
    const auto model = noise::NoiseModel::make(3, table_params());
    auto rec_y = run_detection({kPi / 2, kPi / 2}, Scheme::pipelined, 1, model, LogicalBasis::Y);
    auto rec_x = run_detection({kPi / 2, kPi / 2}, Scheme::pipelined, 1, model, LogicalBasis::X);
    EXPECT_GT(rec_y.retained_fraction, rec_x.retained_fraction);
}

TEST(Experiments, SampledMatchesExactRetention) {
    const auto model = noise::NoiseModel::make(3, table_params());
    const int cycles = 3;
    auto rec = run_detection({0.0, 0.0}, Scheme::pipelined, cycles, model);
    auto sampled = run_detection_sampled({0.0, 0.0}, Scheme::pipelined, cycles, model, 10000, 7);
    const double p = rec.retained_fraction;
    const double se = std::sqrt(p * (1.0 - p) / sampled.shots);
    EXPECT_NEAR(sampled.retained_fraction(), p, 3.0 * se);

    // deterministic with a fixed seed
    auto again = run_detection_sampled({0.0, 0.0}, Scheme::pipelined, cycles, model, 10000, 7);
    EXPECT_EQ(sampled.retained, again.retained);
    EXPECT_EQ(sampled.final_strings, again.final_strings);
}

TEST(Experiments, CompareSchemesUnderPureDecoherence) {
    // the shorter pipelined cycle exposes less idle decoherence
    noise::DeviceParams dev = noise::DeviceParams::ideal();
    for (auto& t : dev.transmons) {
        t.t1 = 25e-6;
        t.t2_star = 40e-6;
        t.t2_echo = 40e-6;
    }
    const auto model = noise::NoiseModel::make(1, dev);
    auto cmp = compare_schemes(5, model);
    ASSERT_EQ(cmp.entries.size(), 4u);
    for (const auto& e : cmp.entries) {
        EXPECT_LT(e.gamma_pipelined, e.gamma_parallel) << e.state;
        EXPECT_GT(e.gamma_pipelined, 0.0);
    }
    EXPECT_LT(cmp.average_ratio, 1.0);
}

TEST(Experiments, EmbedDataState) {
    QuditRegister qutrits({3, 3, 3, 3}, surface7::kDataLabels);
    auto [zl, ol] = surface7::logical_basis();
    auto emb = embed_data_state(zl, qutrits);
    EXPECT_EQ(emb.size(), 81u);
    EXPECT_NEAR(std::abs(emb[qutrits.basis_index({0, 0, 0, 0})]), 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(std::abs(emb[qutrits.basis_index({1, 1, 1, 1})]), 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Experiments, CsvAndPlotHelpers) {
    io::Csv csv({"a", "b"});
    csv.add_row(std::vector<double>{1.0, 2.5});
    EXPECT_EQ(csv.str(), "a,b\n1,2.5\n");
    EXPECT_THROW(csv.add_row(std::vector<double>{1.0}), std::invalid_argument);

    const std::string svg =
        io::svg_line_plot("t", "x", "y", {{"s", {0, 1, 2}, {0.5, 0.4, 0.3}}}, true);
    EXPECT_NE(svg.find("<svg"), std::string::npos);
    EXPECT_NE(svg.find("polyline"), std::string::npos);

    EXPECT_EQ(io::fnv1a_hex("abc"), io::fnv1a_hex("abc"));
    EXPECT_NE(io::fnv1a_hex("abc"), io::fnv1a_hex("abd"));
}
