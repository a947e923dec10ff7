#include <gtest/gtest.h>

#include <cmath>

#include "builders.hpp"
#include "oracles.hpp"
#include "platopt/errors.hpp"

using namespace platopt;

namespace {

EnergySystemModel gt_island(int turbines, double demand, int delay = 0) {
    EnergySystemModel m;
    m.carriers[Carrier::Gas] = build::gas_properties();
    m.nodes = {build::node("N")};
    for (int i = 1; i <= turbines; ++i) {
        m.devices.push_back(build::gas_turbine("gt" + std::to_string(i), "N", 21.8, 0.0, delay));
    }
    m.devices.push_back(build::sink("load", "N", Carrier::Electricity, demand, demand));
    m.devices.push_back(build::source("gas", "N", Carrier::Gas, 1000.0));
    m.devices.push_back(build::sink("heat_dump", "N", Carrier::Heat, 1000.0));
    return m;
}

TimeSeriesSet single_profile(const std::string& id, std::vector<double> values) {
    TimeSeriesSet set;
    set.profiles.push_back({id, values, values});
    return set;
}

VarId el_out(const PlanningProblem& p, std::size_t device, int k) {
    return p.devices[device].out.at(Carrier::Electricity)[k];
}

int turbines_on(const PlanningProblem& p, const Solution& s, int count) {
    int on = 0;
    for (int i = 0; i < count; ++i) on += value_of(s, p.devices[i].on(0)) > 0.5 ? 1 : 0;
    return on;
}

}  // namespace

TEST(Penalty, LinearInterpolation) {
    const PenaltyCurve curve{{{0.0, 0.0}, {10.0, 5.0}}, 0.0, 0.0};
    EXPECT_DOUBLE_EQ(evaluate_penalty(curve, 4.0, 0.0, 0.0), 2.0);
    EXPECT_DOUBLE_EQ(evaluate_penalty(curve, 0.0, 0.0, 0.0), 0.0);
}

TEST(Penalty, SecondSegment) {
    const PenaltyCurve curve{{{0.0, 0.0}, {5.0, 2.0}, {10.0, 6.0}}, 0.0, 0.0};
    EXPECT_DOUBLE_EQ(evaluate_penalty(curve, 7.5, 0.0, 0.0), 4.0);
}

TEST(Penalty, StateCostsAdd) {
    const PenaltyCurve curve{{{0.0, 0.0}, {10.0, 5.0}}, 0.5, 0.25};
    EXPECT_DOUBLE_EQ(evaluate_penalty(curve, 4.0, 1.0, 1.0), 2.75);
}

TEST(Penalty, OutsideDomainThrows) {
    const PenaltyCurve curve{{{0.0, 0.0}, {10.0, 5.0}}, 0.0, 0.0};
    EXPECT_THROW(evaluate_penalty(curve, 10.5, 0.0, 0.0), DomainError);
    EXPECT_THROW(evaluate_penalty(curve, -1.0, 0.0, 0.0), DomainError);
}

TEST(Penalty, EncodedCurveMatchesEvaluation) {
    const std::vector<PenaltyCurve> curves{
        {{{0.0, 0.0}, {10.0, 5.0}}, 0.0, 0.0},
        {{{0.0, 0.0}, {5.0, 2.0}, {10.0, 6.0}}, 0.0, 0.0},  // convex
        {{{0.0, 1.0}, {5.0, 4.0}, {8.0, 4.5}, {10.0, 7.0}}, 0.0, 0.0},  // neither
    };
    for (const auto& curve : curves) {
        EXPECT_EQ(curve.is_convex(), &curve != &curves[2]);
        for (double flow : {0.0, 2.5, 5.0, 7.5, 9.0, 10.0}) {
            MilpModel milp;
            const VarId f = milp.add_continuous("f", 0.0, 10.0);
            milp.fix(f, flow);
            milp.add_objective(encode_penalty(milp, curve, f, 0.0, 0.0, "p"));
            const auto s = build::solve_exact(milp);
            ASSERT_TRUE(s.ok());
            EXPECT_NEAR(s.objective, evaluate_penalty(curve, flow, 0.0, 0.0), 1e-9) << flow;
        }
    }
}

TEST(Reserve, WorkedExample) {
    auto m = gt_island(2, 41.0);
    auto wind = build::source("wind", "N", Carrier::Electricity, 3.0);
    wind.reserve_factor = 1.0;
    m.devices.push_back(wind);
    auto p = assemble(m, build::config(1, 1, 1), TimeSeriesSet{}, BoundaryState::initial(m), 0);
    p.milp.fix(el_out(p, 0, 0), 20.0);
    p.milp.fix(el_out(p, 1, 0), 18.0);
    p.milp.fix(el_out(p, 5, 0), 3.0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(value_of(s, reserve_expression(m, p, 0)), 5.6, 1e-9);
}

TEST(Reserve, ThirdTurbineBelowWindThreshold) {
    for (double wind_mw : {0.0, 1.0, 2.3, 2.5, 3.0, 6.0}) {
        auto m = gt_island(3, 41.0);
        auto wind = build::source("wind", "N", Carrier::Electricity, 24.0);
        wind.reserve_factor = 1.0;
        wind.profile = "wind";
        m.devices.push_back(wind);
        auto c = build::config(1, 1, 1);
        c.reserve_min = 5.0;
        const auto p = assemble(m, c, single_profile("wind", {wind_mw / 24.0}),
                                BoundaryState::initial(m), 0);
        const auto s = build::solve_exact(p.milp);
        ASSERT_TRUE(s.ok()) << wind_mw;
        EXPECT_EQ(turbines_on(p, s, 3), wind_mw < 2.4 ? 3 : 2) << wind_mw;
    }
}

TEST(Reserve, BatteryCountsAvailablePower) {
    EnergySystemModel m;
    m.nodes = {build::node("N")};
    DeviceSpec bat;
    bat.id = "bat";
    bat.node = "N";
    bat.flow_max = 4.0;
    bat.reserve_factor = 1.0;
    bat.params = BatteryParams{1.0, 10.0, 0.0, 0.25, std::nullopt, 5.0, std::nullopt};
    m.devices = {bat};
    auto p = assemble(m, build::config(1, 1, 1), TimeSeriesSet{}, BoundaryState::initial(m), 0);
    p.milp.fix(p.devices[0].in.at(Carrier::Electricity)[0], 0.0);
    p.milp.fix(p.devices[0].out.at(Carrier::Electricity)[0], 0.0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(value_of(s, reserve_expression(m, p, 0)), 4.0, 1e-9);
}

TEST(Reserve, OfflineSystemHasNone) {
    auto m = gt_island(1, 1.0);
    m.devices[0].initial_on = false;
    const auto p =
        assemble(m, build::config(1, 1, 1), TimeSeriesSet{}, BoundaryState::initial(m), 0);
    std::vector<double> zeros(p.milp.variables().size(), 0.0);
    EXPECT_EQ(reserve_expression(m, p, 0).evaluate(zeros), 0.0);
}

TEST(Emission, RateFromGasBurn) {
    auto m = gt_island(1, 10.0);
    m.carriers[Carrier::Gas].co2_content = 2.5;
    const auto p =
        assemble(m, build::config(1, 1, 1), TimeSeriesSet{}, BoundaryState::initial(m), 0);
    std::vector<double> values(p.milp.variables().size(), 0.0);
    values[static_cast<std::size_t>(p.devices[0].in.at(Carrier::Gas)[0].index)] = 3.2;
    EXPECT_NEAR(emission_expression(m, p, 0).evaluate(values), 8.0, 1e-12);
}

TEST(Emission, NoCombustionNoEmission) {
    EnergySystemModel m;
    m.carriers[Carrier::Gas] = build::gas_properties();
    m.nodes = {build::node("N")};
    m.devices = {build::source("wind", "N", Carrier::Electricity, 5.0),
                 build::sink("load", "N", Carrier::Electricity, 5.0)};
    const auto p =
        assemble(m, build::config(1, 1, 1), TimeSeriesSet{}, BoundaryState::initial(m), 0);
    EXPECT_TRUE(emission_expression(m, p, 0).normalized().is_constant());
    EXPECT_EQ(emission_expression(m, p, 0).constant(), 0.0);
}

TEST(Emission, CapBelowIdleBurnIsInfeasible) {
    auto m = gt_island(1, 10.0);
    auto c = build::config(1, 1, 1);
    c.emission_cap = 0.1;
    const auto p = assemble(m, c, TimeSeriesSet{}, BoundaryState::initial(m), 0);
    EXPECT_EQ(build::solve_exact(p.milp).status, SolveStatus::Infeasible);
}

TEST(Assembly, MinimalSystemMatchesEnumeration) {
    const auto m = gt_island(1, 10.0);
    const auto p =
        assemble(m, build::config(2, 1, 2), TimeSeriesSet{}, BoundaryState::initial(m), 0);
    EXPECT_EQ(p.milp.binary_count(), 6u);  // on, start, stop per step
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    const auto ref = oracle::enumerate_binaries(p.milp);
    ASSERT_TRUE(ref.feasible);
    EXPECT_NEAR(s.objective, ref.objective, 1e-6);
    // penalty 3.3 * 10 / 21.8 plus the on cost, per step
    const double step = 3.3 * 10.0 / 21.8 + 0.5;
    EXPECT_NEAR(account_objective(m, p, s).penalty, 2.0 * step, 1e-6);
    EXPECT_NEAR(account_objective(m, p, s).total(), s.objective, 1e-6);
}

TEST(Assembly, StorageWithoutPenaltyHasFreeDeviation) {
    EnergySystemModel m;
    m.nodes = {build::node("N")};
    DeviceSpec bat;
    bat.id = "bat";
    bat.node = "N";
    bat.flow_max = 4.0;
    bat.params = BatteryParams{1.0, 10.0, 0.0, 0.25, std::nullopt, 5.0, std::nullopt};
    m.devices = {bat};
    const auto p =
        assemble(m, build::config(2, 1, 2), TimeSeriesSet{}, BoundaryState::initial(m), 0);
    ASSERT_TRUE(p.devices[0].deviation.valid());
    for (const auto& t : p.milp.objective().normalized().terms()) {
        EXPECT_NE(t.var, p.devices[0].deviation);
    }
}

TEST(Assembly, WindowPastProfileEndThrows) {
    auto m = gt_island(1, 5.0);
    m.devices[1].profile = "load";
    EXPECT_THROW(assemble(m, build::config(4, 1, 4), single_profile("load", {1.0, 1.0}),
                          BoundaryState::initial(m), 0),
                 OutOfDataError);
}

TEST(Assembly, InconsistentBoundaryRejected) {
    const auto m = gt_island(1, 5.0);
    auto b = BoundaryState::initial(m);
    EXPECT_THROW(assemble(m, build::config(2, 1, 2), TimeSeriesSet{}, b, 3), AssemblyError);
    b.devices.erase("gt1");
    EXPECT_THROW(assemble(m, build::config(2, 1, 2), TimeSeriesSet{}, b, 0), AssemblyError);
}

TEST(Assembly, ElasticSlackCoversShortfall) {
    auto m = gt_island(1, 30.0);  // demand above the single turbine
    auto c = build::config(1, 1, 1);
    c.elastic = true;
    const auto p = assemble(m, c, TimeSeriesSet{}, BoundaryState::initial(m), 0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(value_of(s, p.network.nodes[0].slack[0]), 30.0 - 21.8, 1e-6);
    c.elastic = false;
    const auto strict = assemble(m, c, TimeSeriesSet{}, BoundaryState::initial(m), 0);
    EXPECT_EQ(build::solve_exact(strict.milp).status, SolveStatus::Infeasible);
}
