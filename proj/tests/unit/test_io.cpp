#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "builders.hpp"
#include "platopt/errors.hpp"
#include "platopt/io.hpp"

using namespace platopt;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures{PLATOPT_FIXTURES_DIR};

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() /
                     ("platopt_io_" + name + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
    fs::remove_all(dir);
    return dir;
}

const char* kMinimal = R"(simulation:
  timestep: 5 min
  horizon: 1 h
  reoptimisation_interval: 30 min
nodes:
  - id: main
devices:
  - id: load
    type: sink
    carrier: el
    node: main
    flow_max: 2 MW
)";

std::string expect_config_error(const std::string& text) {
    try {
        parse_config(text, ".", false);
    } catch (const ConfigError& e) {
        return e.what();
    }
    ADD_FAILURE() << "no ConfigError for:\n" << text;
    return {};
}

}  // namespace

TEST(Quantity, ConvertsToInternalUnits) {
    EXPECT_DOUBLE_EQ(parse_quantity("5 min", Dimension::Time), 5.0);
    EXPECT_DOUBLE_EQ(parse_quantity("2 h", Dimension::Time), 120.0);
    EXPECT_DOUBLE_EQ(parse_quantity("1500 kW", Dimension::Power), 1.5);
    EXPECT_DOUBLE_EQ(parse_quantity("86400 Sm3/day", Dimension::VolumeFlow), 1.0);
    EXPECT_DOUBLE_EQ(parse_quantity("20 bar", Dimension::Pressure), 2.0);
    EXPECT_DOUBLE_EQ(parse_quantity("1e-3 MWh", Dimension::Energy), 1e-3);
    EXPECT_DOUBLE_EQ(parse_quantity("0.6", Dimension::Dimensionless), 0.6);
}

TEST(Quantity, RejectsMissingOrWrongUnit) {
    EXPECT_THROW(parse_quantity("5", Dimension::Power), ConfigError);
    EXPECT_THROW(parse_quantity("5 min", Dimension::Power), ConfigError);
    EXPECT_THROW(parse_quantity("5 MW", Dimension::Dimensionless), ConfigError);
    EXPECT_THROW(parse_quantity("five MW", Dimension::Power), ConfigError);
}

TEST(Config, MinimalParses) {
    const auto doc = parse_config(kMinimal, ".", false);
    EXPECT_EQ(doc.config.horizon_steps, 12);
    EXPECT_EQ(doc.config.reoptimisation_steps, 6);
    ASSERT_EQ(doc.model.devices.size(), 1u);
    EXPECT_DOUBLE_EQ(doc.model.devices[0].flow_max, 2.0);
}

TEST(Config, UnknownKeyRejectedWithLocation) {
    std::string text = kMinimal;
    text += "windturbines:\n  - id: wt\n";
    const auto message = expect_config_error(text);
    EXPECT_NE(message.find("windturbines"), std::string::npos) << message;
    EXPECT_NE(message.find("line 13, column 1"), std::string::npos) << message;
}

TEST(Config, EmptyAndMalformed) {
    EXPECT_NE(expect_config_error("").find("empty"), std::string::npos);
    EXPECT_NE(expect_config_error("simulation: [unclosed\n").find("line"), std::string::npos);
    EXPECT_NE(expect_config_error("- a\n- b\n").find("mapping"), std::string::npos);
}

TEST(Config, UnitlessPowerRejected) {
    std::string text = kMinimal;
    text.replace(text.find("2 MW"), 4, "2");
    EXPECT_NE(expect_config_error(text).find("unit"), std::string::npos);
}

TEST(Config, StepsMustDivideTimestep) {
    std::string text = kMinimal;
    text.replace(text.find("1 h"), 3, "62 min");
    expect_config_error(text);
}

TEST(Config, BaseFixtureGasTurbines) {
    const auto doc = read_config(kFixtures / "base.yaml");
    int turbines = 0;
    for (const auto& d : doc.model.devices) {
        if (d.type() != DeviceType::GasTurbine) continue;
        ++turbines;
        EXPECT_DOUBLE_EQ(d.flow_max, 21.8);
        EXPECT_DOUBLE_EQ(d.flow_min, 3.5);
        ASSERT_TRUE(d.start_stop.has_value());
        EXPECT_EQ(d.start_stop->delay_steps, 6);
    }
    EXPECT_EQ(turbines, 3);
    EXPECT_EQ(doc.model.profiles.profiles.size(), 1u);
    EXPECT_NO_THROW(load_config(kFixtures / "base.yaml"));
}

TEST(Config, BrokenFixtureListsEveryDiagnostic) {
    try {
        load_config(kFixtures / "broken.yaml");
        FAIL() << "broken config accepted";
    } catch (const ValidationError& e) {
        EXPECT_GE(e.diagnostics().size(), 2u);
        const std::string message = e.what();
        EXPECT_NE(message.find("N9"), std::string::npos) << message;
        EXPECT_NE(message.find("battery"), std::string::npos) << message;
    }
}

TEST(Config, MissingFileIsIoError) {
    EXPECT_THROW(read_config(kFixtures / "does_not_exist.yaml"), IoError);
}

TEST(Config, SerializeRoundTrip) {
    for (const char* name : {"base.yaml", "case_a.yaml", "case_b.yaml", "case_c.yaml",
                             "reserve_day_battery.yaml"}) {
        const auto doc = read_config(kFixtures / name, false);
        const auto text = serialize_config(doc);
        const auto again = parse_config(text, kFixtures, false);
        EXPECT_TRUE(again == doc) << name << "\n" << text;
        EXPECT_EQ(serialize_config(again), text) << name;
    }
}

TEST(TimeSeries, ParsesForecastAndNowcast) {
    const auto set = parse_timeseries("step,wind.forecast,wind.nowcast,load.forecast\n0,0.5,0.6,1\n1,0.4,0.3,2\n");
    ASSERT_EQ(set.profiles.size(), 2u);
    const auto* wind = set.find("wind");
    ASSERT_NE(wind, nullptr);
    EXPECT_EQ(wind->forecast, (std::vector<double>{0.5, 0.4}));
    ASSERT_TRUE(wind->nowcast.has_value());
    EXPECT_EQ(*wind->nowcast, (std::vector<double>{0.6, 0.3}));
    const auto* load = set.find("load");
    ASSERT_NE(load, nullptr);
    EXPECT_FALSE(load->nowcast.has_value());
}

TEST(TimeSeries, ErrorsCarryRowNumbers) {
    auto message = [](const std::string& text) {
        try {
            parse_timeseries(text, "p.csv");
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("accepted");
    };
    EXPECT_NE(message("").find("empty"), std::string::npos);
    EXPECT_NE(message("time,wind.forecast\n0,1\n").find("step"), std::string::npos);
    EXPECT_NE(message("step,wind.forecast\n0,1\n1,-0.5\n").find("row 3"), std::string::npos);
    EXPECT_NE(message("step,wind.forecast\n0,1\n1\n").find("row 3"), std::string::npos);
    EXPECT_NE(message("step,wind.forecast\n0,x\n").find("not a number"), std::string::npos);
    EXPECT_NE(message("step,wind.forecast\n0,1\n2,1\n").find("row 3"), std::string::npos);
    EXPECT_NE(message("step,wind.nowcast\n0,1\n").find("no forecast"), std::string::npos);
}

TEST(TimeSeries, WeekFileHas2016Rows) {
    const auto set = load_timeseries(kFixtures / "wind_week.csv");
    ASSERT_EQ(set.profiles.size(), 1u);
    EXPECT_GE(set.profiles[0].forecast.size(), 2016u);
}

TEST(TimeSeries, FormatRoundTrip) {
    const auto set = load_timeseries(kFixtures / "reserve_day.csv");
    EXPECT_EQ(parse_timeseries(format_timeseries(set)), set);
}

TEST(Sha256, KnownDigests) {
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(KpiJson, RoundTrip) {
    KpiSummary k;
    k.steps = 2016;
    k.timestep_minutes = 5.0;
    k.emission_total_kg = 1.25e6;
    k.emission_mean_kg_per_s = 2.0670634920634921;
    k.gt_starts = 3;
    k.gt_stops = 2;
    k.min_reserve_mw = 5.5;
    k.gas_turbines = {{"gt1", 12.5, 0.5, 2, 1}};
    EXPECT_EQ(parse_kpi_json(format_kpi_json(k)), k);
    EXPECT_THROW(parse_kpi_json("{\"steps\": 1}"), IoError);
}

TEST(Bundle, WriteReadRoundTrip) {
    const auto dir = scratch_dir("bundle");
    ConfigDocument doc = parse_config(kMinimal, ".", false);
    doc.model.devices[0].flow_min = 1.0;
    SimulationResult r;
    r.steps = 3;
    r.timestep_minutes = 5.0;
    r.series["dev.load.flow"] = {1.0, 1.5, 0.1 + 0.2};
    r.series["dev.load.in.el"] = {1.0, 1.5, 0.1 + 0.2};
    WindowReport w;
    w.index = 0;
    w.t0 = 0;
    w.committed = 3;
    w.status = SolveStatus::Optimal;
    w.objective = 1.0 / 3.0;
    w.accounted_objective = 1.0 / 3.0;
    r.windows = {w};

    const auto bundle = make_bundle(r, doc, kMinimal, "highs");
    EXPECT_EQ(bundle.metadata.config_sha256, sha256_hex(kMinimal));
    write_results(bundle, dir, false);
    for (const char* f : {"series.csv", "windows.csv", "kpi.json", "metadata.json", "config.yaml"}) {
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    }

    const auto back = read_results(dir);
    EXPECT_EQ(back.metadata, bundle.metadata);
    EXPECT_EQ(back.config_text, kMinimal);
    EXPECT_EQ(back.result.series, r.series);
    ASSERT_EQ(back.result.windows.size(), 1u);
    EXPECT_EQ(back.result.windows[0].objective, w.objective);
    EXPECT_EQ(back.kpis, bundle.kpis);
    EXPECT_EQ(bundle_document(back).model.devices.size(), 1u);

    EXPECT_THROW(write_results(bundle, dir, false), ConfigError);
    EXPECT_NO_THROW(write_results(bundle, dir, true));
    fs::remove_all(dir);
}

TEST(Bundle, MissingDirectoryIsIoError) {
    EXPECT_THROW(read_results(scratch_dir("missing")), IoError);
}
