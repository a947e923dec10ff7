#include <gtest/gtest.h>

#include "builders.hpp"
#include "oracles.hpp"
#include "platopt/errors.hpp"
#include "platopt/physics.hpp"

using namespace platopt;

namespace {

EnergySystemModel base_model() {
    EnergySystemModel m;
    m.nodes = {build::node("N")};
    m.carriers[Carrier::Gas] = build::gas_properties();
    CarrierProperties h2;
    h2.calorific_value = 120.0;
    m.carriers[Carrier::Hydrogen] = h2;
    return m;
}

VarId in_var(const DeviceVariables& v, Carrier c, int k) { return v.in.at(c)[k]; }
VarId out_var(const DeviceVariables& v, Carrier c, int k) { return v.out.at(c)[k]; }

double at(const Solution& s, VarId v) { return s.values[static_cast<std::size_t>(v.index)]; }

DeviceHistory cold(int delay) {
    DeviceHistory h;
    h.on = 0;
    h.starts.assign(static_cast<std::size_t>(delay), 0);
    return h;
}

DeviceSpec gas_turbine_a2() {
    auto d = build::gas_turbine("gt", "N", 21.8, 0.0, 0);
    d.params = GasTurbineParams{2.0, 0.3, 0.5};
    return d;
}

}  // namespace

// ------------------------------------------------------------------ generic

TEST(Generic, RampLimitCapsIncrease) {
    const auto m = base_model();
    auto d = build::source("gen", "N", Carrier::Electricity, 10.0);
    d.ramp_up = 0.1;
    DeviceHistory h;
    h.flow = 5.0;
    auto p = build::device_problem(m, d, h, 1);
    p.milp.add_objective(p.vars.f(0), -1.0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(build::value(s, p.vars.f(0)), 6.0, 1e-9);
}

TEST(Generic, RampSkippedWithoutFlowHistory) {
    const auto m = base_model();
    auto d = build::source("gen", "N", Carrier::Electricity, 10.0);
    d.ramp_up = 0.1;
    auto p = build::device_problem(m, d, DeviceHistory{}, 1);
    p.milp.add_objective(p.vars.f(0), -1.0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(build::value(s, p.vars.f(0)), 10.0, 1e-9);
}

TEST(Generic, RampWithZeroCapacityIsConfigError) {
    const auto m = base_model();
    auto d = build::source("gen", "N", Carrier::Electricity, 0.0);
    d.ramp_down = 0.2;
    DeviceHistory h;
    h.flow = 0.0;
    EXPECT_THROW(build::device_problem(m, d, h, 1), ConfigError);
}

TEST(Generic, OffStateForcesZeroFlowDespiteMinimum) {
    const auto m = base_model();
    auto d = build::gas_turbine("gt", "N", 20.0, 4.0, 0);
    auto p = build::device_problem(m, d, cold(0), 3);
    for (VarId v : p.vars.y_start) p.milp.fix(v, 0.0);
    p.milp.add_objective(p.vars.f(0) + p.vars.f(1) + p.vars.f(2), -1.0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(build::value(s, p.vars.f(k)), 0.0, 1e-9);
}

TEST(Generic, DelayedStartFollowsPreparationSequence) {
    const auto m = base_model();
    auto d = build::gas_turbine("gt", "N", 20.0, 0.0, 4);
    const int horizon = 10;
    auto p = build::device_problem(m, d, cold(4), horizon);
    std::vector<int> start(horizon, 0), stop(horizon, 0);
    start[2] = 1;
    for (int k = 0; k < horizon; ++k) {
        p.milp.fix(p.vars.y_start[k], start[k]);
        p.milp.fix(p.vars.y_stop[k], stop[k]);
    }
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    const auto trace = oracle::start_stop_machine(4, 0, start, stop);
    ASSERT_TRUE(trace.valid);
    for (int k = 0; k < horizon; ++k) {
        const int prep_expected = (k >= 2 && k <= 5) ? 1 : 0;
        const int on_expected = k >= 6 ? 1 : 0;
        EXPECT_NEAR(at(s, p.vars.y_prep[k]), prep_expected, 1e-9) << "k=" << k;
        EXPECT_NEAR(at(s, p.vars.y_on[k]), on_expected, 1e-9) << "k=" << k;
        EXPECT_EQ(trace.prep[k], prep_expected);
        EXPECT_EQ(trace.on[k], on_expected);
    }
}

TEST(Generic, ShortStartHistoryRejected) {
    const auto m = base_model();
    auto d = build::gas_turbine("gt", "N", 20.0, 0.0, 4);
    EXPECT_THROW(build::device_problem(m, d, cold(2), 8), AssemblyError);
    EXPECT_THROW(build::device_problem(m, d, cold(4), 4), AssemblyError);
}

TEST(Generic, ProfileScalesDemandBound) {
    const auto m = base_model();
    const auto d = build::sink("load", "N", Carrier::Electricity, 40.0);
    auto p = build::device_problem(m, d, DeviceHistory{}, 1, 1.0, {1.05});
    p.milp.add_objective(p.vars.f(0), -1.0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(build::value(s, p.vars.f(0)), 42.0, 1e-9);
}

TEST(Generic, WindProfileBoundsCurtailableOutput) {
    const auto m = base_model();
    const auto d = build::source("wind", "N", Carrier::Electricity, 24.0);
    for (double pr : {0.0, 0.5}) {
        auto p = build::device_problem(m, d, DeviceHistory{}, 1, 1.0, {pr});
        p.milp.add_objective(p.vars.f(0), -1.0);
        const auto s = build::solve_exact(p.milp);
        ASSERT_TRUE(s.ok());
        EXPECT_NEAR(build::value(s, p.vars.f(0)), 24.0 * pr, 1e-9);
    }
}

// ------------------------------------------------------------ type-specific

TEST(Well, SplitsWellstream) {
    const auto m = base_model();
    DeviceSpec d;
    d.id = "well";
    d.node = "N";
    d.flow_max = 10.0;
    d.params = WellParams{500.0, 0.6, 0.0, std::nullopt, std::nullopt};
    auto p = build::device_problem(m, d, DeviceHistory{}, 1);
    p.milp.fix(p.vars.flow[0], 1.0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(at(s, out_var(p.vars, Carrier::Water, 0)), 0.6 / 201.0, 1e-12);
    EXPECT_NEAR(at(s, out_var(p.vars, Carrier::Oil, 0)), 0.4 / 201.0, 1e-12);
    EXPECT_NEAR(at(s, out_var(p.vars, Carrier::Gas, 0)), 200.0 / 201.0, 1e-9);
}

TEST(Well, GasLiftProportionalToOil) {
    const auto m = base_model();
    DeviceSpec d;
    d.id = "well";
    d.node = "N";
    d.flow_max = 10.0;
    d.params = WellParams{100.0, 0.5, 3.0, std::nullopt, std::nullopt};
    auto p = build::device_problem(m, d, DeviceHistory{}, 1);
    p.milp.fix(p.vars.flow[0], 2.0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    const double oil = at(s, out_var(p.vars, Carrier::Oil, 0));
    EXPECT_NEAR(at(s, in_var(p.vars, Carrier::Gas, 0)), 3.0 * oil, 1e-9);
}

TEST(Separator, DemandsScaleWithThroughput) {
    const auto m = base_model();
    DeviceSpec d;
    d.id = "sep";
    d.node = "N";
    d.flow_max = 100.0;
    d.params = SeparatorParams{0.5, 0.01, {}};
    auto p = build::device_problem(m, d, DeviceHistory{}, 1);
    p.milp.fix(in_var(p.vars, Carrier::Oil, 0), 1.0);
    p.milp.fix(in_var(p.vars, Carrier::Gas, 0), 2.0);
    p.milp.fix(in_var(p.vars, Carrier::Water, 0), 3.0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(at(s, in_var(p.vars, Carrier::Heat, 0)), 3.0, 1e-9);
    EXPECT_NEAR(at(s, in_var(p.vars, Carrier::Electricity, 0)), 0.06, 1e-9);
    EXPECT_NEAR(at(s, out_var(p.vars, Carrier::Gas, 0)), 2.0, 1e-9);
}

TEST(Separator, ElectricDemandExample) {
    const auto m = base_model();
    DeviceSpec d;
    d.id = "sep";
    d.node = "N";
    d.flow_max = 100.0;
    d.params = SeparatorParams{0.0, 0.01, {}};
    auto p = build::device_problem(m, d, DeviceHistory{}, 1);
    p.milp.fix(in_var(p.vars, Carrier::Oil, 0), 20.0);
    p.milp.fix(in_var(p.vars, Carrier::Gas, 0), 0.0);
    p.milp.fix(in_var(p.vars, Carrier::Water, 0), 0.0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(at(s, in_var(p.vars, Carrier::Electricity, 0)), 0.2, 1e-9);
}

TEST(Compressor, ElectricPassThrough) {
    const auto m = base_model();
    DeviceSpec d;
    d.id = "comp";
    d.node = "N";
    d.flow_max = 50.0;
    CompressorParams c;
    c.nominal_flow = 30.0;
    c.nominal_inlet_pressure = 4.0;
    c.nominal_outlet_pressure = 12.0;
    d.params = c;
    auto p = build::device_problem(m, d, DeviceHistory{}, 2);
    p.milp.fix(in_var(p.vars, Carrier::Gas, 0), 0.0);
    p.milp.fix(in_var(p.vars, Carrier::Gas, 1), 30.0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(at(s, in_var(p.vars, Carrier::Electricity, 0)), 0.0, 1e-9);
    EXPECT_NEAR(at(s, out_var(p.vars, Carrier::Gas, 1)), 30.0, 1e-9);
    const double expected =
        physics::compressor_power_nonlinear(30.0, 4.0, 12.0, physics::compressor_coefficients(c));
    EXPECT_NEAR(at(s, in_var(p.vars, Carrier::Electricity, 1)), expected, 1e-9);
}

TEST(Compressor, GasDrivenDeductsFuel) {
    const auto m = base_model();
    DeviceSpec d;
    d.id = "comp";
    d.node = "N";
    d.flow_max = 500.0;
    CompressorParams c;
    c.drive = CompressorDrive::Gas;
    c.nominal_flow = 30.0;
    c.nominal_inlet_pressure = 4.0;
    c.nominal_outlet_pressure = 12.0;
    d.params = c;
    const auto lin = physics::linearize_compressor({30.0, 4.0, 12.0}, physics::compressor_coefficients(c));
    // throughput that needs exactly 4 MW at nominal pressures
    const double q = 4.0 / lin.per_flow;
    auto p = build::device_problem(m, d, DeviceHistory{}, 1);
    p.milp.fix(out_var(p.vars, Carrier::Gas, 0), q);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(at(s, in_var(p.vars, Carrier::Gas, 0)) - q, 0.1, 1e-9);
}

TEST(Pump, PowerFromNominalHead) {
    const auto m = base_model();
    DeviceSpec d;
    d.id = "pump";
    d.node = "N";
    d.flow_max = 1.0;
    d.params = PumpParams{Carrier::Water, 0.75, 0.3, 3.0};
    auto p = build::device_problem(m, d, DeviceHistory{}, 1);
    p.milp.fix(in_var(p.vars, Carrier::Water, 0), 0.01);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(at(s, in_var(p.vars, Carrier::Electricity, 0)), 0.036, 1e-12);
    EXPECT_NEAR(at(s, out_var(p.vars, Carrier::Water, 0)), 0.01, 1e-12);
}

TEST(GasTurbine, FuelAtHalfLoad) {
    const auto m = base_model();
    auto d = gas_turbine_a2();
    auto p = build::device_problem(m, d, initial_history(d), 1);
    p.milp.fix(p.vars.y_on[0], 1.0);
    p.milp.fix(out_var(p.vars, Carrier::Electricity, 0), 10.9);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    const double gas = at(s, in_var(p.vars, Carrier::Gas, 0));
    EXPECT_NEAR(gas, 0.7085, 1e-9);
    EXPECT_NEAR(at(s, out_var(p.vars, Carrier::Heat, 0)), 0.5 * (40.0 * gas - 10.9), 1e-9);
}

TEST(GasTurbine, OffStateBurnsNothing) {
    const auto m = base_model();
    auto d = gas_turbine_a2();
    auto p = build::device_problem(m, d, cold(0), 2);
    for (VarId v : p.vars.y_start) p.milp.fix(v, 0.0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    for (int k = 0; k < 2; ++k) {
        EXPECT_NEAR(at(s, in_var(p.vars, Carrier::Gas, k)), 0.0, 1e-12);
        EXPECT_NEAR(at(s, out_var(p.vars, Carrier::Electricity, k)), 0.0, 1e-12);
        EXPECT_NEAR(at(s, out_var(p.vars, Carrier::Heat, k)), 0.0, 1e-12);
    }
}

TEST(GasTurbine, PreparationBurnsFuel) {
    const auto m = base_model();
    auto d = gas_turbine_a2();
    d.start_stop->delay_steps = 2;
    DeviceHistory h = cold(2);
    h.starts[0] = 1;  // started one step before the window
    auto p = build::device_problem(m, d, h, 3);
    for (VarId v : p.vars.y_start) p.milp.fix(v, 0.0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(at(s, p.vars.y_prep[0]), 1.0, 1e-12);
    EXPECT_NEAR(at(s, p.vars.y_on[0]), 0.0, 1e-12);
    EXPECT_NEAR(at(s, out_var(p.vars, Carrier::Electricity, 0)), 0.0, 1e-12);
    EXPECT_NEAR(at(s, in_var(p.vars, Carrier::Gas, 0)), 0.3 * 21.8 / 40.0, 1e-9);
    EXPECT_NEAR(at(s, p.vars.y_on[1]), 1.0, 1e-12);
}

TEST(GasTurbine, HistoricStartCannotBeCancelled) {
    const auto m = base_model();
    auto d = gas_turbine_a2();
    d.start_stop->delay_steps = 2;
    DeviceHistory h = cold(2);
    h.starts[1] = 1;  // lands at k = 0
    auto p = build::device_problem(m, d, h, 3);
    p.milp.fix(p.vars.y_on[0], 0.0);
    EXPECT_EQ(build::solve_exact(p.milp).status, SolveStatus::Infeasible);
}

TEST(Heater, EfficiencyScalesHeat) {
    const auto m = base_model();
    DeviceSpec d;
    d.id = "hp";
    d.node = "N";
    d.flow_max = 10.0;
    d.params = HeaterParams{3.0};
    auto p = build::device_problem(m, d, DeviceHistory{}, 2);
    p.milp.fix(in_var(p.vars, Carrier::Electricity, 0), 2.0);
    p.milp.fix(in_var(p.vars, Carrier::Electricity, 1), 0.0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(at(s, out_var(p.vars, Carrier::Heat, 0)), 6.0, 1e-12);
    EXPECT_NEAR(at(s, out_var(p.vars, Carrier::Heat, 1)), 0.0, 1e-12);
}

TEST(Battery, ChargingRaisesLevel) {
    const auto m = base_model();
    DeviceSpec d;
    d.id = "bat";
    d.node = "N";
    d.flow_max = 4.0;
    d.params = BatteryParams{0.9, 10.0, 0.0, 0.25, std::nullopt, 5.0, std::nullopt};
    auto p = build::device_problem(m, d, initial_history(d), 2);
    p.milp.fix(in_var(p.vars, Carrier::Electricity, 0), 1.0);
    p.milp.fix(out_var(p.vars, Carrier::Electricity, 0), 0.0);
    p.milp.fix(in_var(p.vars, Carrier::Electricity, 1), 0.0);
    p.milp.fix(out_var(p.vars, Carrier::Electricity, 1), 0.0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(at(s, p.vars.level[0]), 5.9, 1e-9);
    EXPECT_NEAR(at(s, p.vars.level[1]), 5.9, 1e-9);
}

TEST(Battery, AvailablePowerLimitedByEnergy) {
    const auto m = base_model();
    DeviceSpec d;
    d.id = "bat";
    d.node = "N";
    d.flow_max = 4.0;
    d.params = BatteryParams{1.0, 10.0, 0.0, 0.25, std::nullopt, 0.5, std::nullopt};
    auto p = build::device_problem(m, d, initial_history(d), 1);
    p.milp.fix(in_var(p.vars, Carrier::Electricity, 0), 0.0);
    p.milp.fix(out_var(p.vars, Carrier::Electricity, 0), 0.0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(at(s, p.vars.p_max[0]), 2.0, 1e-9);
    EXPECT_NEAR(at(s, p.vars.y_storage[0]), 1.0, 1e-9);
}

TEST(Battery, AvailablePowerLimitedByRating) {
    const auto m = base_model();
    DeviceSpec d;
    d.id = "bat";
    d.node = "N";
    d.flow_max = 4.0;
    d.params = BatteryParams{1.0, 10.0, 0.0, 0.25, std::nullopt, 8.0, std::nullopt};
    auto p = build::device_problem(m, d, initial_history(d), 1);
    p.milp.fix(in_var(p.vars, Carrier::Electricity, 0), 0.0);
    p.milp.fix(out_var(p.vars, Carrier::Electricity, 0), 0.0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(at(s, p.vars.p_max[0]), 4.0, 1e-9);
}

TEST(Battery, DefaultBigM) {
    DeviceSpec d;
    d.flow_max = 4.0;
    d.params = BatteryParams{1.0, 10.0, 0.0, 0.25, std::nullopt, std::nullopt, std::nullopt};
    EXPECT_DOUBLE_EQ(battery_big_m(d), 48.0);
}

TEST(HydrogenStorage, DeficitPenalised) {
    const auto m = base_model();
    DeviceSpec d;
    d.id = "h2";
    d.node = "N";
    d.flow_max = 1.0;
    d.params = HydrogenStorageParams{200.0, 0.0, std::nullopt, 100.0};
    auto p = build::device_problem(m, d, initial_history(d), 1);
    p.milp.fix(in_var(p.vars, Carrier::Hydrogen, 0), 0.0);
    p.milp.fix(out_var(p.vars, Carrier::Hydrogen, 0), 20.0 / 3600.0);
    p.milp.add_objective(p.vars.deviation, 1.0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(at(s, p.vars.level[0]), 80.0, 1e-9);
    EXPECT_NEAR(at(s, p.vars.deviation), 20.0, 1e-9);
}

TEST(HydrogenStorage, BalancedFlowsKeepLevel) {
    const auto m = base_model();
    DeviceSpec d;
    d.id = "h2";
    d.node = "N";
    d.flow_max = 5.0;
    d.params = HydrogenStorageParams{1e5, 0.0, std::nullopt, 100.0};
    auto p = build::device_problem(m, d, initial_history(d), 1);
    p.milp.fix(in_var(p.vars, Carrier::Hydrogen, 0), 2.0);
    p.milp.fix(out_var(p.vars, Carrier::Hydrogen, 0), 2.0);
    p.milp.add_objective(p.vars.deviation, 1.0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(at(s, p.vars.level[0]), 100.0, 1e-9);
    EXPECT_NEAR(at(s, p.vars.deviation), 0.0, 1e-9);
}

TEST(Electrolyser, HydrogenAndHeat) {
    const auto m = base_model();
    DeviceSpec d;
    d.id = "ely";
    d.node = "N";
    d.flow_max = 20.0;
    for (double heat_eff : {0.0, 0.5}) {
        d.params = ElectrolyserParams{0.7, heat_eff};
        auto p = build::device_problem(m, d, DeviceHistory{}, 1);
        p.milp.fix(in_var(p.vars, Carrier::Electricity, 0), 10.0);
        const auto s = build::solve_exact(p.milp);
        ASSERT_TRUE(s.ok());
        EXPECT_NEAR(120.0 * at(s, out_var(p.vars, Carrier::Hydrogen, 0)), 7.0, 1e-9);
        EXPECT_NEAR(at(s, out_var(p.vars, Carrier::Heat, 0)), heat_eff * 3.0, 1e-9);
    }
}

TEST(FuelCell, ElectricityFromHydrogen) {
    const auto m = base_model();
    DeviceSpec d;
    d.id = "fc";
    d.node = "N";
    d.flow_max = 20.0;
    d.params = FuelCellParams{0.6, 1.0};
    auto p = build::device_problem(m, d, DeviceHistory{}, 1);
    p.milp.fix(in_var(p.vars, Carrier::Hydrogen, 0), 0.1);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    const double el = at(s, out_var(p.vars, Carrier::Electricity, 0));
    EXPECT_NEAR(el, 7.2, 1e-9);
    EXPECT_NEAR(el + at(s, out_var(p.vars, Carrier::Heat, 0)), 12.0, 1e-9);
}

TEST(Devices, MissingCalorificValueIsConfigError) {
    EnergySystemModel m;
    m.nodes = {build::node("N")};
    auto d = gas_turbine_a2();
    EXPECT_THROW(build::device_problem(m, d, initial_history(d), 1), ConfigError);
}
