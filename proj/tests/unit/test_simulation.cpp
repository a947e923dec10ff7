#include <gtest/gtest.h>

#include "builders.hpp"
#include "platopt/errors.hpp"
#include "platopt/simulation.hpp"

using namespace platopt;

namespace {

// Gas turbine and a wind source serving a load that follows a profile.
EnergySystemModel wind_island(int delay) {
    EnergySystemModel m;
    m.carriers[Carrier::Gas] = build::gas_properties();
    m.nodes = {build::node("N")};
    m.devices.push_back(build::gas_turbine("gt", "N", 21.8, 0.0, delay));
    auto wind = build::source("wind", "N", Carrier::Electricity, 10.0);
    wind.profile = "wind";
    m.devices.push_back(wind);
    auto load = build::sink("load", "N", Carrier::Electricity, 12.0, 12.0);
    m.devices.push_back(load);
    m.devices.push_back(build::source("gas", "N", Carrier::Gas, 100.0));
    m.devices.push_back(build::sink("heat_dump", "N", Carrier::Heat, 500.0));
    return m;
}

TimeSeriesSet wind_profile(int length) {
    TimeSeriesSet set;
    std::vector<double> v;
    for (int t = 0; t < length; ++t) v.push_back(0.5 + 0.4 * ((t % 7) / 6.0 - 0.5));
    set.profiles.push_back({"wind", v, v});
    return set;
}

EnergySystemModel battery_island() {
    EnergySystemModel m;
    m.nodes = {build::node("N")};
    DeviceSpec bat;
    bat.id = "bat";
    bat.node = "N";
    bat.flow_max = 4.0;
    bat.storage_penalty = 1.0;  // rules out charging and discharging at once
    bat.params = BatteryParams{0.9, 10.0, 0.0, 0.25, std::nullopt, 5.0, std::nullopt};
    auto load = build::sink("load", "N", Carrier::Electricity, 2.0, 2.0);
    m.devices = {bat, load};
    return m;
}

}  // namespace

TEST(Simulation, SingleShotEqualsOneSolve) {
    const auto m = wind_island(0);
    const auto profiles = wind_profile(12);
    const auto c = build::config(12, 12, 12);
    HighsBackend backend;
    const auto result = run_simulation(m, c, profiles, backend);
    ASSERT_EQ(result.windows.size(), 1u);
    EXPECT_EQ(result.windows[0].committed, 12);

    const auto p = assemble(m, c, profiles, BoundaryState::initial(m), 0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(result.windows[0].objective, s.objective, 1e-6);
    const auto& flow = result.series.at("dev.gt.flow");
    ASSERT_EQ(flow.size(), 12u);
    for (int k = 0; k < 12; ++k) {
        EXPECT_NEAR(flow[k], value_of(s, p.devices[0].f(k)), 1e-6);
    }
}

TEST(Simulation, ZeroSpanDoesNothing) {
    const auto m = wind_island(0);
    auto c = build::config(6, 3, 0);
    HighsBackend backend;
    const auto result = run_simulation(m, c, wind_profile(12), backend);
    EXPECT_TRUE(result.windows.empty());
    EXPECT_TRUE(result.series.empty());
    EXPECT_EQ(result.steps, 0);
}

TEST(Simulation, SingleStepCommits) {
    const auto m = wind_island(0);
    const auto c = build::config(4, 1, 5);
    HighsBackend backend;
    int calls = 0;
    const auto result =
        run_simulation(m, c, wind_profile(12), backend, [&](const WindowReport&) { ++calls; });
    ASSERT_EQ(result.windows.size(), 5u);
    EXPECT_EQ(calls, 5);
    for (std::size_t i = 0; i < result.windows.size(); ++i) {
        EXPECT_EQ(result.windows[i].committed, 1);
        EXPECT_EQ(result.windows[i].t0, static_cast<int>(i));
        EXPECT_LT(result.windows[i].max_residual, 1e-6);
        EXPECT_NEAR(result.windows[i].accounted_objective, result.windows[i].objective, 1e-6);
    }
    for (const auto& [name, values] : result.series) EXPECT_EQ(values.size(), 5u) << name;
}

TEST(Simulation, PartialLastWindow) {
    const auto m = wind_island(0);
    const auto c = build::config(4, 3, 7);
    HighsBackend backend;
    const auto result = run_simulation(m, c, wind_profile(12), backend);
    ASSERT_EQ(result.windows.size(), 3u);
    EXPECT_EQ(result.windows[2].committed, 1);
    EXPECT_EQ(result.series.at("dev.load.flow").size(), 7u);
}

TEST(Simulation, RunningPastDataThrows) {
    const auto m = wind_island(0);
    const auto c = build::config(6, 3, 10);
    HighsBackend backend;
    EXPECT_THROW(run_simulation(m, c, wind_profile(12), backend), OutOfDataError);
}

TEST(Simulation, InfeasibleWindowReportsSolverError) {
    auto m = wind_island(0);
    // demand beyond the turbine and the wind together
    m.devices[2].flow_min = 40.0;
    m.devices[2].flow_max = 40.0;
    HighsBackend backend;
    EXPECT_THROW(run_simulation(m, build::config(4, 2, 4), wind_profile(12), backend), SolverError);
}

TEST(DefaultSpan, WholeIntervalsInsideData) {
    const auto c = build::config(24, 6, 0);
    EXPECT_EQ(default_span(c, 2016), 1998);
    EXPECT_EQ(default_span(c, 24), 6);
    EXPECT_EQ(default_span(c, 23), 0);
}

TEST(CommitWindow, StorageLevelCarriesOver) {
    const auto m = battery_island();
    const auto c = build::config(6, 3, 6);
    const auto p = assemble(m, c, TimeSeriesSet{}, BoundaryState::initial(m), 0);
    const auto s = build::solve_exact(p.milp);
    ASSERT_TRUE(s.ok());
    SimulationState state;
    state.boundary = BoundaryState::initial(m);
    state = commit_window(std::move(state), m, p, s, 3);
    EXPECT_EQ(state.step, 3);
    EXPECT_EQ(state.boundary.t0, 3);
    const double level = value_of(s, p.devices[0].level[2]);
    ASSERT_TRUE(state.boundary.devices.at("bat").level.has_value());
    EXPECT_DOUBLE_EQ(*state.boundary.devices.at("bat").level, level);
    EXPECT_EQ(state.series.at("dev.bat.level").size(), 3u);
    // supplying 2 MW for three 5-minute steps drains 0.5/0.9 MWh
    EXPECT_NEAR(level, 5.0 - 3.0 * 2.0 / 12.0 / 0.9, 1e-9);
}

TEST(CommitWindow, StartHistoryCrossesSeam) {
    auto m = wind_island(6);
    m.devices[0].initial_on = false;
    m.devices[2].flow_min = 0.0;  // the wind alone may carry the load while the unit is off
    const auto profiles = wind_profile(40);
    const auto c = build::config(12, 6, 18);
    auto first = assemble(m, c, profiles, BoundaryState::initial(m), 0);
    for (int k = 0; k < 12; ++k) first.milp.fix(first.devices[0].y_start[k], k == 4 ? 1.0 : 0.0);
    const auto s1 = build::solve_exact(first.milp);
    ASSERT_TRUE(s1.ok());

    SimulationState state;
    state.boundary = BoundaryState::initial(m);
    state = commit_window(std::move(state), m, first, s1, 6);
    const auto& h = state.boundary.devices.at("gt");
    ASSERT_EQ(h.starts.size(), 6u);
    EXPECT_EQ(h.starts[1], 1);  // start at step 4 is one step before the last committed step
    EXPECT_EQ(h.on, 0);

    auto second = assemble(m, c, profiles, state.boundary, 6);
    const auto s2 = build::solve_exact(second.milp);
    ASSERT_TRUE(s2.ok());
    // six steps after the start at step 4 the unit is online, at step 10 = 6 + 4
    for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(value_of(s2, second.devices[0].on(k)), 0.0, 1e-9) << k;
        EXPECT_NEAR(value_of(s2, second.devices[0].prep(k)), 1.0, 1e-9) << k;
    }
    EXPECT_NEAR(value_of(s2, second.devices[0].on(4)), 1.0, 1e-9);
}

TEST(CommitWindow, MismatchedStepRejected) {
    const auto m = battery_island();
    const auto c = build::config(6, 3, 6);
    const auto p = assemble(m, c, TimeSeriesSet{}, BoundaryState::initial(m), 0);
    const auto s = build::solve_exact(p.milp);
    SimulationState state;
    state.step = 3;
    EXPECT_THROW(commit_window(state, m, p, s, 3), AssemblyError);
    state.step = 0;
    EXPECT_THROW(commit_window(state, m, p, s, 7), AssemblyError);
}
