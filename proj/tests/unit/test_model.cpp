#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "builders.hpp"
#include "platopt/errors.hpp"
#include "platopt/model.hpp"

using namespace platopt;

namespace {

EnergySystemModel two_node_model() {
    EnergySystemModel m;
    m.nodes = {build::node("N1"), build::node("N2")};
    m.edges = {build::edge("cable", Carrier::Electricity, "N1", "N2")};
    m.devices = {build::source("gen", "N1", Carrier::Electricity, 10.0),
                 build::sink("load", "N2", Carrier::Electricity, 5.0)};
    return m;
}

bool mentions(const std::vector<Diagnostic>& diags, const std::string& element,
              const std::string& text) {
    return std::any_of(diags.begin(), diags.end(), [&](const Diagnostic& d) {
        return d.element.find(element) != std::string::npos &&
               d.message.find(text) != std::string::npos;
    });
}

}  // namespace

TEST(Validation, WellFormedModelHasNoDiagnostics) {
    EXPECT_TRUE(validate_model(two_node_model()).empty());
}

TEST(Validation, DanglingEdgeEndpoint) {
    auto m = two_node_model();
    m.edges[0].to = "N9";
    const auto diags = validate_model(m);
    ASSERT_EQ(diags.size(), 1u);
    EXPECT_TRUE(mentions(diags, "cable", "N9"));
}

TEST(Validation, InvertedBatteryLevels) {
    auto m = two_node_model();
    DeviceSpec b;
    b.id = "bat";
    b.node = "N1";
    b.flow_max = 4.0;
    b.params = BatteryParams{0.95, 2.0, 3.0, 0.25};
    m.devices.push_back(b);
    const auto diags = validate_model(m);
    EXPECT_TRUE(mentions(diags, "bat", "E_min <= E_max"));
}

TEST(Validation, DuplicateIdsAndMissingNode) {
    auto m = two_node_model();
    m.devices.push_back(build::sink("load", "nowhere", Carrier::Electricity, 1.0));
    const auto diags = validate_model(m);
    EXPECT_TRUE(mentions(diags, "load", "nowhere"));
    EXPECT_GE(diags.size(), 2u);
}

TEST(Validation, ZeroCapacityDeviceRejected) {
    auto m = two_node_model();
    m.devices[1].flow_max = 0.0;
    EXPECT_TRUE(mentions(validate_model(m), "load", "flow_max"));
}

TEST(Validation, ConfigNeedsHorizonCoveringReoptimisation) {
    auto m = two_node_model();
    auto c = build::config(4, 6, 12);
    EXPECT_FALSE(validate_config(c, m).empty());
    c = build::config(24, 6, 12);
    EXPECT_TRUE(validate_config(c, m).empty());
}

TEST(ProfileValue, NowcastInsideWindow) {
    Profile p{"wind", {0.5, 0.6}, std::vector<double>{0.4, 0.7}};
    EXPECT_DOUBLE_EQ(profile_value(p, 0, 0, 2), 0.4);
    EXPECT_DOUBLE_EQ(profile_value(p, 0, 1, 2), 0.7);
    EXPECT_DOUBLE_EQ(profile_value(p, 0, 1, 1), 0.6);
}

TEST(ProfileValue, ExhaustedSeriesThrows) {
    Profile p{"wind", {0.5, 0.6}, std::vector<double>{0.4, 0.7}};
    EXPECT_THROW(profile_value(p, 0, 2, 2), OutOfDataError);
    EXPECT_THROW(profile_value(p, 1, 1, 0), OutOfDataError);
}

TEST(ProfileValue, FallsBackToForecast) {
    Profile p{"wind", {0.5, 0.6}, std::nullopt};
    EXPECT_DOUBLE_EQ(profile_value(p, 0, 1, 2), 0.6);
}

TEST(ForecastView, NowcastForFirstOffsetsOnly) {
    TimeSeriesSet set;
    set.profiles.push_back({"wind", {1, 1, 1, 1, 1, 1}, std::vector<double>{0, 0, 0, 0, 0, 0}});
    const auto view = forecast_view(set, 1, 4, 2);
    EXPECT_EQ(view.at("wind"), (std::vector<double>{0, 0, 1, 1}));
    EXPECT_EQ(forecast_view(set, 0, 3, 0).at("wind"), (std::vector<double>{1, 1, 1}));
}

TEST(ForecastView, IdenticalWhenNowcastEqualsForecast) {
    TimeSeriesSet set;
    const std::vector<double> v{0.1, 0.2, 0.3, 0.4};
    set.profiles.push_back({"wind", v, v});
    EXPECT_EQ(forecast_view(set, 0, 4, 0), forecast_view(set, 0, 4, 3));
}

TEST(ForecastNoise, ZeroSigmaReturnsNowcast) {
    const std::vector<double> now{0.3, 0.0, 0.9, 1.2};
    EXPECT_EQ(generate_forecast_from_nowcast(now, 0.0, 42), now);
}

TEST(ForecastNoise, ClippedAtZero) {
    const std::vector<double> now(500, 0.01);
    const auto f = generate_forecast_from_nowcast(now, 5.0, 7);
    EXPECT_TRUE(std::all_of(f.begin(), f.end(), [](double x) { return x >= 0.0; }));
    EXPECT_TRUE(std::any_of(f.begin(), f.end(), [](double x) { return x == 0.0; }));
}

TEST(ForecastNoise, DeterministicForSeed) {
    const std::vector<double> now(100, 0.5);
    EXPECT_EQ(generate_forecast_from_nowcast(now, 0.1, 11),
              generate_forecast_from_nowcast(now, 0.1, 11));
    EXPECT_NE(generate_forecast_from_nowcast(now, 0.1, 11),
              generate_forecast_from_nowcast(now, 0.1, 12));
}

TEST(ForecastNoise, ProfilesGetIndependentStreams) {
    TimeSeriesSet set;
    const std::vector<double> v(50, 0.5);
    set.profiles.push_back({"a", v, v});
    set.profiles.push_back({"b", v, v});
    SimulationConfig c;
    c.seed = 3;
    c.forecast_noise = {{"a", 0.1}, {"b", 0.1}};
    apply_forecast_noise(set, c);
    EXPECT_NE(set.profiles[0].forecast, set.profiles[1].forecast);
    EXPECT_EQ(*set.profiles[0].nowcast, v);
}

TEST(Carriers, NamesRoundTrip) {
    for (Carrier c : kNetworkCarriers) {
        EXPECT_EQ(carrier_from_string(to_string(c)), c);
    }
    EXPECT_EQ(carrier_from_string("electricity"), Carrier::Electricity);
    EXPECT_FALSE(carrier_from_string("steam").has_value());
}

TEST(Devices, SerialCarriers) {
    DeviceSpec comp;
    comp.params = CompressorParams{};
    EXPECT_EQ(device_serial_carriers(comp), std::vector<Carrier>{Carrier::Gas});
    const auto gen = build::source("g", "n", Carrier::Electricity, 1.0);
    EXPECT_TRUE(device_serial_carriers(gen).empty());
}
