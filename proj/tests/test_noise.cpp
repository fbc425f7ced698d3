#include <cmath>

#include "gtest/gtest.h"
#include "s7sim/circuits.hpp"
#include "s7sim/density_matrix.hpp"
#include "s7sim/executor.hpp"
#include "s7sim/gates.hpp"
#include "s7sim/noise.hpp"
#include "s7sim/surface7.hpp"

using namespace s7sim;
using namespace s7sim::noise;

namespace {
constexpr double kPi = 3.14159265358979323846;

DeviceParams table_params() {
    return DeviceParams::from_json_file(std::string(TEST_DATA_DIR) +
                                        "/../../data/device_params.json");
}
}  // namespace

TEST(Noise, IdleChannelExamples) {
    // finite decay over one cycle of idling
    const double t1 = 27e-6;
    DensityMatrix dm(QuditRegister::qubits(1), {1});
    dm.apply_kraus(amplitude_damping(t1, 840e-9, 2, 0));
    EXPECT_NEAR(dm.at(1, 1).real(), std::exp(-0.84e-6 / t1), 1e-10);

    EXPECT_THROW(amplitude_damping(-1.0, 1e-9, 2, 0), std::invalid_argument);
    EXPECT_THROW(phase_damping(0.0, 1e-9, 2, 0), std::invalid_argument);

    // dephasing law on the coherence
    DensityMatrix plus(QuditRegister::qubits(1), {0});
    plus.apply_unitary(gates::rphi(kPi / 2, 0.0), {0});
    const double tphi = 10e-6, dt = 60e-9;
    plus.apply_kraus(phase_damping(tphi, dt, 2, 0));
    EXPECT_NEAR(plus.expectation("X"), std::exp(-dt / tphi), 1e-12);
}

TEST(Noise, DephasingRates) {
    EXPECT_NEAR(pure_dephasing_rate(27e-6, 54e-6), 0.0, 1e-9);
    EXPECT_NEAR(pure_dephasing_rate(44e-6, 70e-6), 1.0 / 70e-6 - 1.0 / 88e-6, 1e-6);

    // flux-noise contribution: sqrtA = 3 uPhi0, D_phi = 1 GHz/Phi0
    const double rate = offsweetspot_dephasing_rate(3e-6, 1e9, 0.0);
    EXPECT_NEAR(rate, 2 * kPi * std::sqrt(std::log(2.0)) * 3e-6 * 1e9, 1.0);
    EXPECT_NEAR(rate, 1.57e4, 0.01e4);
    // zero sensitivity reduces to the sweetspot rate
    EXPECT_NEAR(offsweetspot_dephasing_rate(3e-6, 0.0, 10e-6), 1e5, 1e-6);
}

TEST(Noise, DeviceParamsIngestion) {
    DeviceParams dev = table_params();
    ASSERT_EQ(dev.transmons.size(), 7u);
    EXPECT_EQ(dev.transmons[0].label, "D1");
    EXPECT_NEAR(dev.by_label("D4").t1, 102e-6, 1e-12);
    EXPECT_NEAR(dev.by_label("A2").readout_fidelity, 0.942, 1e-12);
    EXPECT_FALSE(dev.by_label("D2").anharmonicity_mhz.has_value());
    EXPECT_NEAR(dev.sqrt_a_phi0, 3e-6, 1e-18);
    EXPECT_NEAR(dev.zz_coupling_hz[0][4], -310e3, 1e-6);
    ASSERT_TRUE(dev.cz_phase_table.count("A2-D4"));

    // assignment columns are stochastic
    for (const auto& t : dev.transmons) {
        for (int col = 0; col < 3; ++col) {
            double sum = 0.0;
            for (int row = 0; row < 3; ++row) sum += t.assignment[row][col];
            EXPECT_NEAR(sum, 1.0, 1e-12);
        }
        EXPECT_LE(t.t2_echo, 2.0 * t.t1 + 1e-12);
    }

    // T2 above the 2*T1 bound is rejected
    EXPECT_THROW(DeviceParams::from_json_text(R"({"transmons":[
        {"label":"Q","t1_us":10,"t2_echo_us":25,"readout_fidelity":0.99}]})"),
                 std::invalid_argument);
}

TEST(Noise, ModelLayering) {
    DeviceParams dev = table_params();
    EXPECT_THROW(NoiseModel::make(6, dev), std::invalid_argument);
    EXPECT_THROW(NoiseModel::make(5, dev, 0.3), std::invalid_argument);

    const auto m0 = NoiseModel::make(0, dev);
    EXPECT_FALSE(m0.with_decoherence());
    EXPECT_EQ(m0.register_dims(), std::vector<int>(7, 2));
    EXPECT_EQ(m0.residual_excitation(0), 0.0);

    const auto m3 = NoiseModel::make(3, dev);
    EXPECT_TRUE(m3.with_decoherence());
    EXPECT_TRUE(m3.with_flux_dephasing());
    EXPECT_TRUE(m3.with_spam());
    EXPECT_FALSE(m3.with_zz_phases());
    EXPECT_NEAR(m3.residual_excitation(2), 0.01, 1e-12);

    const auto m5 = NoiseModel::make(5, dev, 0.05);
    EXPECT_TRUE(m5.with_leakage());
    EXPECT_EQ(m5.register_dims(), (std::vector<int>{3, 3, 3, 3, 3, 2, 2}));

    // dressing phases only from level 4 up
    const auto ideal_phases = m3.cz_dressing("A2", "D4");
    EXPECT_NEAR(ideal_phases[2], kPi, 1e-12);
    const auto m4 = NoiseModel::make(4, dev);
    EXPECT_NEAR(m4.cz_dressing("A2", "D4")[2], 3.24, 1e-12);
}

TEST(Noise, SpamLayerExamples) {
    DeviceParams dev = DeviceParams::ideal();
    dev.transmons[0].p_excited = 0.01;
    const auto model = NoiseModel::make(3, dev);
    const exec::Runner runner(model);
    auto dm = runner.initial_state();
    EXPECT_NEAR(dm.expectation("ZIIIIII"), 0.98, 1e-12);

    // assignment error: declared-0 branch on |1> has probability P(0|1)
    DeviceParams dev2 = DeviceParams::ideal();
    dev2.transmons[0].assignment = {{0.99, 0.02, 0.0}, {0.01, 0.98, 1.0}, {0.0, 0.0, 0.0}};
    const auto model2 = NoiseModel::make(3, dev2);
    DensityMatrix one(QuditRegister::qubits(7, surface7::kAllLabels), {1, 0, 0, 0, 0, 0, 0});
    const auto povm = model2.readout_povm(0, 2);
    auto res = one.measure_condition(0, 0, povm);
    EXPECT_NEAR(res.probability, 0.02, 1e-12);

    // POVM completeness across the table
    for (int site = 0; site < 7; ++site) {
        const auto p = NoiseModel::make(3, table_params()).readout_povm(site, 2);
        double sum00 = 0.0, sum11 = 0.0;
        for (const auto& el : p) {
            sum00 += el.diag[0] * el.diag[0];
            sum11 += el.diag[1] * el.diag[1];
        }
        EXPECT_NEAR(sum00, 1.0, 1e-10);
        EXPECT_NEAR(sum11, 1.0, 1e-10);
    }
}

TEST(Noise, ZzDressingChangesBranch) {
    // a miscalibrated conditional phase breaks the stabilizer eigenstate: a
    // cycle on |0_L> no longer keeps the no-error branch at probability 1
    DeviceParams dev = DeviceParams::ideal();
    for (const auto& info : circuits::cz_table())
        dev.cz_phase_table[info.ancilla + "-" + info.data] = {0.0, 0.0, kPi + 0.1};
    const auto model = NoiseModel::make(4, dev);
    const exec::Runner runner(model);
    auto [zero_l, one_l] = surface7::logical_basis();
    std::vector<cplx> amps(128, cplx(0, 0));
    for (int b = 0; b < 16; ++b) amps[b * 8] = zero_l[b];
    DensityMatrix dm =
        DensityMatrix::from_pure(QuditRegister::qubits(7, surface7::kAllLabels), amps);
    auto run = runner.run(circuits::build_cycle(circuits::Scheme::pipelined), std::move(dm));
    ASSERT_FALSE(run.zero_branch);
    EXPECT_LT(run.branch_probability, 1.0 - 1e-6);

    // fully miscalibrated CZs (all phases zero) act as identities: the checks
    // never fire on |0000>, so every ancilla still reads 0
    DeviceParams dev2 = DeviceParams::ideal();
    for (const auto& info : circuits::cz_table())
        dev2.cz_phase_table[info.ancilla + "-" + info.data] = {0.0, 0.0, 0.0};
    auto run2 = exec::Runner(NoiseModel::make(4, dev2))
                    .run(circuits::build_detection_circuit({0.0, 0.0},
                                                           circuits::Scheme::pipelined, 1));
    EXPECT_NEAR(run2.branch_probability, 1.0, 1e-10);
}

TEST(Noise, LeakageUnitary) {
    // L1 = 0 leaves the qubit block a plain CZ
    auto u0 = gates::cz_with_leakage(0.0, false, 3, 3);
    EXPECT_NEAR(std::abs(u0[4 * 9 + 4] + 1.0), 0.0, 1e-12);  // <11|U|11> = -1

    // L1 = 0.25 fully transfers |11> to |02>
    DensityMatrix dm(QuditRegister({3, 3}, {"a", "b"}), {1, 1});
    dm.apply_unitary(gates::cz_with_leakage(0.25, false, 3, 3), {0, 1});
    EXPECT_NEAR(dm.at(2, 2).real(), 1.0, 1e-12);

    // L1 = 0.05 leaks 20% of the |11> population
    DensityMatrix dm2(QuditRegister({3, 3}, {"a", "b"}), {1, 1});
    dm2.apply_unitary(gates::cz_with_leakage(0.05, false, 3, 3), {0, 1});
    EXPECT_NEAR(dm2.at(2, 2).real(), 0.20, 1e-12);
    EXPECT_NEAR(dm2.at(4, 4).real(), 0.80, 1e-12);

    // |20> variant for the one CZ using the other avoided crossing
    DensityMatrix dm3(QuditRegister({3, 3}, {"a", "b"}), {1, 1});
    dm3.apply_unitary(gates::cz_with_leakage(0.25, true, 3, 3), {0, 1});
    EXPECT_NEAR(dm3.at(6, 6).real(), 1.0, 1e-12);

    EXPECT_THROW(gates::cz_with_leakage(0.3, false, 3, 3), std::invalid_argument);
    EXPECT_THROW(gates::cz_with_leakage(0.1, false, 2, 2), std::invalid_argument);
}

TEST(Noise, TracePreservedThroughNoisyCycles) {
    DeviceParams dev = table_params();
    for (int level : {1, 3, 5}) {
        const auto model = NoiseModel::make(level, dev, level == 5 ? 0.05 : 0.0);
        const exec::Runner runner(model);
        auto state = runner.initial_state();
        circuits::TimedCircuit c;
        c.site_labels = surface7::kAllLabels;
        c.cycle_period_ns = circuits::kPipelinedPeriodNs;
        circuits::append_cycle(c, circuits::Scheme::pipelined, 0, 0.0);
        // strip the conditioning so the full map must be trace preserving
        circuits::TimedCircuit nomeas;
        nomeas.site_labels = c.site_labels;
        for (auto& ins : c.instructions)
            if (ins.kind != circuits::Kind::measure) nomeas.append(std::move(ins));
        auto run = runner.run(nomeas, std::move(state));
        EXPECT_NEAR(run.state->trace(), 1.0, 1e-9) << "level " << level;
        EXPECT_LT(run.state->hermiticity_error(), 1e-11);
        if (level < 5) EXPECT_GT(run.state->min_eigenvalue(), -1e-10);
    }
}
