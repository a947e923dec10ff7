#include <gtest/gtest.h>

#include <cmath>

#include "builders.hpp"
#include "platopt/errors.hpp"
#include "platopt/kpi.hpp"

using namespace platopt;

namespace {

EnergySystemModel one_turbine() {
    EnergySystemModel m;
    CarrierProperties gas = build::gas_properties();
    gas.co2_content = 2.5;
    m.carriers[Carrier::Gas] = gas;
    m.nodes = {build::node("N")};
    m.devices = {build::gas_turbine("gt", "N", 21.8, 0.0, 0)};
    return m;
}

SimulationResult constant_result(int steps, std::map<std::string, double> values) {
    SimulationResult r;
    r.steps = steps;
    r.timestep_minutes = 5.0;
    for (const auto& [name, v] : values) r.series[name].assign(static_cast<std::size_t>(steps), v);
    return r;
}

}  // namespace

TEST(Usage, WeekOnlineIs168Hours) {
    const auto r = constant_result(2016, {{"dev.gt.on", 1.0}});
    const auto usage = gas_turbine_usage(r, one_turbine());
    ASSERT_EQ(usage.size(), 1u);
    EXPECT_NEAR(usage[0].running_hours, 168.0, 1e-9);
}

TEST(Usage, NeverStarted) {
    const auto r = constant_result(
        100, {{"dev.gt.on", 0.0}, {"dev.gt.start", 0.0}, {"dev.gt.stop", 0.0}, {"dev.gt.prep", 0.0}});
    const auto u = gas_turbine_usage(r, one_turbine())[0];
    EXPECT_EQ(u.running_hours, 0.0);
    EXPECT_EQ(u.starts, 0);
    EXPECT_EQ(u.stops, 0);
}

TEST(Usage, OneStartOneStop) {
    auto r = constant_result(
        48, {{"dev.gt.on", 0.0}, {"dev.gt.start", 0.0}, {"dev.gt.stop", 0.0}, {"dev.gt.prep", 0.0}});
    r.series["dev.gt.start"][10] = 1.0;
    for (int t = 10; t < 34; ++t) r.series["dev.gt.on"][t] = 1.0;
    r.series["dev.gt.stop"][34] = 1.0;
    const auto u = gas_turbine_usage(r, one_turbine())[0];
    EXPECT_EQ(u.starts, 1);
    EXPECT_EQ(u.stops, 1);
    EXPECT_NEAR(u.running_hours, 24.0 / 12.0, 1e-12);
}

TEST(Emission, FlatRateFromConstantBurn) {
    const auto r = constant_result(288, {{"dev.gt.in.gas", 3.2}});
    const auto series = emission_series(r, one_turbine());
    ASSERT_EQ(series.size(), 288u);
    for (double e : series) EXPECT_NEAR(e, 8.0, 1e-12);
    const auto k = compute_kpis(r, one_turbine());
    EXPECT_NEAR(k.emission_mean_kg_per_s, 8.0, 1e-12);
    EXPECT_NEAR(k.emission_total_kg, 8.0 * 86400.0, 1e-6);
    EXPECT_NEAR(k.gas_burned_sm3, 3.2 * 86400.0, 1e-6);
}

TEST(Emission, NothingBurned) {
    const auto r = constant_result(10, {{"dev.gt.in.gas", 0.0}});
    for (double e : emission_series(r, one_turbine())) EXPECT_EQ(e, 0.0);
}

TEST(Reserve, WorkedExampleFromCommittedStep) {
    EnergySystemModel m;
    m.nodes = {build::node("N")};
    m.devices = {build::gas_turbine("gt1", "N", 21.8, 0.0, 0),
                 build::gas_turbine("gt2", "N", 21.8, 0.0, 0),
                 build::source("wind", "N", Carrier::Electricity, 3.0)};
    m.devices[2].reserve_factor = 1.0;
    const auto r = constant_result(1, {{"dev.gt1.on", 1.0},
                                       {"dev.gt2.on", 1.0},
                                       {"dev.gt1.out.el", 20.0},
                                       {"dev.gt2.out.el", 18.0},
                                       {"dev.wind.out.el", 3.0}});
    const auto reserve = reserve_series(r, m);
    EXPECT_NEAR(reserve.total[0], 5.6, 1e-12);
    EXPECT_NEAR(reserve.by_device.at("gt1")[0], 1.8, 1e-12);
    EXPECT_NEAR(reserve.by_device.at("wind")[0], 0.0, 1e-12);
}

TEST(Reserve, OfflineGivesNothing) {
    const auto r = constant_result(3, {{"dev.gt.on", 0.0}});
    for (double v : reserve_series(r, one_turbine()).total) EXPECT_EQ(v, 0.0);
}

TEST(Compare, SelfRatiosAreOne) {
    const auto r = constant_result(12, {{"dev.gt.in.gas", 1.0}, {"dev.gt.on", 1.0}});
    const auto k = compute_kpis(r, one_turbine());
    for (const auto& row : compare_cases({k, k, k})) {
        ASSERT_EQ(row.ratios.size(), 3u);
        for (double ratio : row.ratios) EXPECT_EQ(ratio, 1.0) << row.kpi;
    }
}

TEST(Compare, ZeroBaseGivesNaNForNonzero) {
    KpiSummary a;
    a.steps = 10;
    a.timestep_minutes = 5.0;
    KpiSummary b = a;
    b.gt_starts = 2;
    for (const auto& row : compare_cases({a, b})) {
        if (row.kpi == "gt_starts") {
            EXPECT_TRUE(std::isnan(row.ratios[1]));
        }
    }
}

TEST(Compare, RejectsMismatchedSpans) {
    KpiSummary a;
    a.steps = 10;
    KpiSummary b;
    b.steps = 11;
    EXPECT_THROW(compare_cases({a, b}), ConfigError);
    EXPECT_THROW(compare_cases({a}), ConfigError);
}

TEST(Kpis, ElasticSlackReported) {
    auto r = constant_result(12, {{"node.N.slack", 0.0}, {"system.reserve_slack", 0.0}});
    r.series["node.N.slack"][3] = 6.0;
    const auto k = compute_kpis(r, one_turbine());
    EXPECT_TRUE(k.elastic_active);
    EXPECT_NEAR(k.elastic_supply_mwh, 0.5, 1e-12);
    EXPECT_EQ(k.elastic_reserve_mwh, 0.0);
}

namespace {

EnergySystemModel battery_model() {
    EnergySystemModel m;
    m.nodes = {build::node("N")};
    DeviceSpec bat;
    bat.id = "bat";
    bat.node = "N";
    bat.flow_max = 4.0;
    bat.params = BatteryParams{0.9, 10.0, 0.0, 0.25, std::nullopt, 2.0, std::nullopt};
    m.devices = {bat, build::source("gen", "N", Carrier::Electricity, 5.0)};
    return m;
}

// Charge 1 MW for two hours at 5-minute steps, the generator feeding it.
SimulationResult charging_result() {
    auto r = constant_result(24, {{"dev.bat.in.el", 1.0},
                                  {"dev.bat.out.el", 0.0},
                                  {"dev.gen.out.el", 1.0},
                                  {"node.N.qterm.el", -1.0}});
    auto& level = r.series["dev.bat.level"];
    for (int t = 0; t < 24; ++t) level.push_back(2.0 + 0.9 * (t + 1) / 12.0);
    return r;
}

}  // namespace

TEST(Storage, ChargingRaisesLevel) {
    const auto m = battery_model();
    const auto s = storage_series(charging_result(), m);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_NEAR(s[0].level.back() - 2.0, 1.8, 1e-12);
}

TEST(Audit, ConsistentSeriesPass) {
    const auto m = battery_model();
    const auto report = conservation_audit(charging_result(), m, build::config(12, 6, 24));
    EXPECT_LT(report.max_residual(), 1e-12);
    EXPECT_GT(report.checked_rows, 0);
}

TEST(Audit, TamperedSeriesDetected) {
    const auto m = battery_model();
    auto r = charging_result();
    r.series["dev.bat.level"][10] += 0.01;
    r.series["dev.gen.out.el"][5] = 1.2;
    const auto report = conservation_audit(r, m, build::config(12, 6, 24));
    EXPECT_NEAR(report.max_storage_residual, 0.01, 1e-12);
    EXPECT_NEAR(report.max_balance_residual, 0.2, 1e-12);
    EXPECT_NE(report.worst_balance.find("step 5"), std::string::npos);
}

TEST(Audit, SimulatedRunConserves) {
    EnergySystemModel m;
    m.carriers[Carrier::Gas] = build::gas_properties();
    m.nodes = {build::node("A"), build::node("B")};
    auto cable = build::edge("cable", Carrier::Electricity, "A", "B");
    cable.losses = {{0.0, 0.0}, {20.0, 0.8}, {40.0, 2.4}};
    cable.max_flow = 40.0;
    m.edges = {cable};
    m.devices = {build::gas_turbine("gt", "A", 21.8, 2.0, 0),
                 build::source("gas", "A", Carrier::Gas, 100.0),
                 build::sink("load", "B", Carrier::Electricity, 15.0, 15.0),
                 build::sink("heat_dump", "A", Carrier::Heat, 500.0)};
    const auto c = build::config(6, 3, 12);
    HighsBackend backend;
    const auto result = run_simulation(m, c, TimeSeriesSet{}, backend);
    const auto report = conservation_audit(result, m, c);
    EXPECT_LT(report.max_residual(), 1e-6) << report.worst_balance;
}
