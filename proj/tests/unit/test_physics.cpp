#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "platopt/errors.hpp"
#include "platopt/physics.hpp"

using namespace platopt;
using namespace platopt::physics;

TEST(WellSplit, LeogoFractions) {
    const auto s = well_split(500.0, 0.6);
    EXPECT_NEAR(s.water, 0.6 / 201.0, 1e-15);
    EXPECT_NEAR(s.oil, 0.4 / 201.0, 1e-15);
    EXPECT_NEAR(s.gas, 200.0 / 201.0, 1e-15);
    EXPECT_NEAR(s.water, 2.9851e-3, 1e-7);
    EXPECT_NEAR(s.oil, 1.9900e-3, 1e-7);
    EXPECT_NEAR(s.gas, 0.995025, 1e-6);
}

TEST(WellSplit, MatchesOracleAndSumsToOne) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> gor(0.0, 2000.0);
    std::uniform_real_distribution<double> wc(0.0, 0.99);
    for (int i = 0; i < 200; ++i) {
        const double r = gor(rng);
        const double w = wc(rng);
        const auto s = well_split(r, w);
        const auto o = oracle::wellstream_fractions(r, w);
        EXPECT_NEAR(s.water + s.oil + s.gas, 1.0, 1e-12);
        EXPECT_NEAR(s.water, o.water, 1e-12);
        EXPECT_NEAR(s.oil, o.oil, 1e-12);
        EXPECT_NEAR(s.gas, o.gas, 1e-12);
    }
}

TEST(WellSplit, RejectsInvalidWaterCut) {
    EXPECT_THROW(well_split(100.0, 1.0), DomainError);
    EXPECT_THROW(well_split(-1.0, 0.5), DomainError);
}

TEST(Compressor, NonlinearExamples) {
    const CompressorCoefficients c{1.0, 0.25};
    EXPECT_NEAR(compressor_power_nonlinear(1.0, 1.0, 2.0, c), 0.189207, 1e-6);
    EXPECT_EQ(compressor_power_nonlinear(3.0, 5.0, 5.0, c), 0.0);
    EXPECT_EQ(compressor_power_nonlinear(0.0, 1.0, 2.0, c), 0.0);
}

TEST(Compressor, LinearisedAtNominal) {
    const CompressorCoefficients c{1.0, 0.25};
    const CompressorNominal n{1.0, 1.0, 2.0};
    EXPECT_NEAR(compressor_power_linearized(1.0, 1.0, 2.0, n, c), 0.189207, 1e-6);
    EXPECT_NEAR(compressor_power_linearized(0.0, 1.0, 2.0, n, c), 0.0, 1e-15);
    const auto lin = linearize_compressor(n, c);
    EXPECT_NEAR(lin.per_flow + lin.per_inlet_pressure * 1.0 + lin.per_outlet_pressure * 2.0,
                compressor_power_linearized(1.0, 1.0, 2.0, n, c), 1e-12);
}

TEST(Compressor, FirstOrderAgreement) {
    const CompressorCoefficients c{1.0, 0.25};
    const CompressorNominal n{1.0, 1.0, 2.0};
    for (double h : {1e-2, 1e-3}) {
        const double lin = compressor_power_linearized(1.0, 1.0, 2.0 * (1 + h), n, c);
        const double nl = compressor_power_nonlinear(1.0, 1.0, 2.0 * (1 + h), c);
        EXPECT_LT(std::abs(lin - nl), 0.2 * h * nl);
    }
}

TEST(Compressor, CoefficientsMatchOracle) {
    CompressorParams p;
    p.density = 0.84;
    p.isentropic_efficiency = 0.75;
    p.heat_capacity_ratio = 1.3;
    p.compressibility = 0.9;
    p.gas_constant = 500.0;
    p.inlet_temperature = 300.0;
    const auto c = compressor_coefficients(p);
    const double expected = oracle::compressor_power(46.5, 6.0, 12.0, 0.84, 0.75, 1.3, 0.9, 500.0, 300.0);
    EXPECT_NEAR(compressor_power_nonlinear(46.5, 6.0, 12.0, c), expected, 1e-12 * expected);
}

TEST(Pump, Examples) {
    EXPECT_NEAR(pump_power(0.01, 0.75, 0.3, 3.0), 0.036, 1e-12);
    EXPECT_EQ(pump_power(0.0, 0.75, 0.3, 3.0), 0.0);
    EXPECT_EQ(pump_power(2.0, 1.0, 4.0, 4.0), 0.0);
}

TEST(GasTurbine, FuelDraw) {
    EXPECT_NEAR(gas_turbine_fuel(10.9, 21.8, 2.0, 0.3, 1.0, 0.0, 40.0), 0.7085, 1e-12);
    EXPECT_EQ(gas_turbine_fuel(0.0, 21.8, 2.0, 0.3, 0.0, 0.0, 40.0), 0.0);
    EXPECT_NEAR(gas_turbine_fuel(0.0, 21.8, 2.0, 0.3, 0.0, 1.0, 40.0), 0.3 * 21.8 / 40.0, 1e-12);
}

TEST(Weymouth, UnitPipeExample) {
    WeymouthPipe pipe;
    pipe.k = 1.0;
    EXPECT_NEAR(weymouth_flow(10.0, 9.0, pipe), std::sqrt(19.0), 1e-12);
    EXPECT_NEAR(weymouth_flow_linearized(10.0, 9.0, pipe, 10.0, 9.0), 4.3589, 1e-4);
    EXPECT_NEAR(weymouth_flow_linearized(10.0, 9.0, pipe, 10.0, 9.0), std::sqrt(19.0), 1e-12);
}

TEST(Weymouth, DegenerateNominalRejected) {
    WeymouthPipe pipe;
    pipe.k = 1.0;
    EXPECT_THROW(linearize_weymouth(pipe, 10.0, 10.0), InfeasibleNominalError);
}

TEST(Weymouth, FlatPipeLimit) {
    const auto pipe = weymouth_pipe(500.0, 20.0, 10.0, 10.0, 288.0, 0.101, 0.6, 300.0, 0.9);
    EXPECT_EQ(pipe.s, 0.0);
    EXPECT_EQ(pipe.equivalent_length_km, 20.0);
    const auto tilted = weymouth_pipe(500.0, 20.0, 0.0, 1e-6, 288.0, 0.101, 0.6, 300.0, 0.9);
    EXPECT_NEAR(tilted.equivalent_length_km, 20.0, 1e-6);
}

TEST(Weymouth, MatchesOracleWithElevation) {
    const auto pipe = weymouth_pipe(600.0, 35.0, 0.0, 120.0, 288.0, 0.101, 0.65, 290.0, 0.88);
    const double expected =
        oracle::weymouth_flow(12.0, 7.0, 600.0, 35.0, 0.0, 120.0, 288.0, 0.101, 0.65, 290.0, 0.88);
    EXPECT_NEAR(weymouth_flow(12.0, 7.0, pipe), expected, 1e-12 * expected);
}

TEST(Darcy, NominalFlowMatchesOracle) {
    const auto pipe = darcy_pipe(300.0, 5.0, 0.02, 850.0, 0.0, 0.0);
    const auto lin = linearize_darcy(pipe, 6.0, 4.0);
    const double expected = oracle::darcy_flow(6.0, 4.0, 300.0, 5.0, 0.02, 850.0, 0.0, 0.0);
    EXPECT_NEAR(lin.nominal_flow, expected, 1e-9 * expected);
    EXPECT_NEAR(darcy_flow_linearized(6.0, 4.0, lin), expected, 1e-9 * expected);
}

TEST(Darcy, AnchoredAtNominal) {
    const auto pipe = darcy_pipe(250.0, 3.0, 0.018, 1025.0, -20.0, 15.0);
    const auto lin = linearize_darcy(pipe, 10.0, 7.0);
    // at q = q_hat the relation gives p2 - p1 = p2_hat - p1_hat
    EXPECT_NEAR(lin.nominal_difference, -3.0, 1e-15);
    EXPECT_NEAR(darcy_pressure_difference(lin.nominal_flow, pipe), -3.0, 1e-12);
}

TEST(Darcy, ZeroDriveRejected) {
    const auto pipe = darcy_pipe(250.0, 3.0, 0.018, 1000.0, 0.0, 100.0);
    // uphill pipe with no pressure difference cannot drive a forward flow
    EXPECT_GT(pipe.elevation_head, 0.0);
    EXPECT_THROW(linearize_darcy(pipe, 5.0, 5.0), InfeasibleNominalError);
}
