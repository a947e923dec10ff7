#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "platopt/cli.hpp"
#include "platopt/io.hpp"

using namespace platopt;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures{PLATOPT_FIXTURES_DIR};

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

// The last stderr line must be a JSON error record.
nlohmann::json error_record(const Run& r) {
    auto text = r.err;
    while (!text.empty() && text.back() == '\n') text.pop_back();
    const auto pos = text.rfind('\n');
    return nlohmann::json::parse(pos == std::string::npos ? text : text.substr(pos + 1));
}

std::string small_config(double demand) {
    return "simulation:\n"
           "  timestep: 5 min\n"
           "  horizon: 30 min\n"
           "  reoptimisation_interval: 15 min\n"
           "  span: 1 h\n"
           "nodes:\n"
           "  - id: main\n"
           "devices:\n"
           "  - {id: gen, type: source, carrier: el, node: main, flow_max: 5 MW}\n"
           "  - {id: load, type: sink, carrier: el, node: main, flow_min: " +
           std::to_string(demand) + " MW, flow_max: " + std::to_string(demand) + " MW}\n";
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("platopt_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) {
        write_text_file(dir_ / name, text);
        return (dir_ / name).string();
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, ValidateAcceptsGoodConfig) {
    const auto r = cli({"validate", "--config", write("ok.yaml", small_config(2.0))});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("ok:"), std::string::npos);
    EXPECT_TRUE(r.err.empty());
}

TEST_F(CliTest, ValidateReportsDiagnostics) {
    const auto r = cli({"validate", "--config", (kFixtures / "broken.yaml").string()});
    EXPECT_EQ(r.code, kExitUser);
    EXPECT_NE(r.out.find("N9"), std::string::npos) << r.out;
    const auto record = error_record(r);
    EXPECT_EQ(record["error"], "validation");
    EXPECT_EQ(record["exit_code"], 1);
}

TEST_F(CliTest, SyntaxErrorIsUserError) {
    const auto r = cli({"validate", "--config", write("bad.yaml", "simulation: [\n")});
    EXPECT_EQ(r.code, kExitUser);
    EXPECT_EQ(error_record(r)["error"], "config");
    EXPECT_NE(error_record(r)["message"].get<std::string>().find("line"), std::string::npos);
}

TEST_F(CliTest, MissingFileIsIoError) {
    const auto r = cli({"validate", "--config", path("nope.yaml")});
    EXPECT_EQ(r.code, kExitIo);
    EXPECT_EQ(error_record(r)["error"], "io");
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(cli({}).code, kExitUser);
    const auto r = cli({"simulate", "--config", "x.yaml"});
    EXPECT_EQ(r.code, kExitUser);
    EXPECT_EQ(error_record(r)["error"], "usage");
    EXPECT_EQ(cli({"--version"}).out, std::string(kVersion) + "\n");
}

TEST_F(CliTest, SimulateThenKpiAndCompare) {
    const auto config = write("case.yaml", small_config(2.0));
    const auto a = path("a");
    const auto b = path("b");
    auto r = cli({"simulate", "--config", config, "--out", a, "--quiet"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("wrote 12 steps in 4 windows"), std::string::npos) << r.out;
    ASSERT_EQ(cli({"simulate", "--config", config, "--out", b, "--quiet"}).code, 0);

    const auto bundle = read_results(a);
    EXPECT_EQ(bundle.result.steps, 12);
    for (double v : bundle.result.series.at("dev.gen.flow")) EXPECT_NEAR(v, 2.0, 1e-6);

    r = cli({"kpi", a, "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(parse_kpi_json(r.out), bundle.kpis);
    EXPECT_EQ(cli({"kpi", a, "--json", "--recompute"}).out, r.out);

    r = cli({"compare", a, b, "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["cases"], (nlohmann::json{"a", "b"}));
    EXPECT_EQ(j["kpis"]["gt_starts"]["values"], (nlohmann::json{0.0, 0.0}));

    r = cli({"plot", a, b, "--out", path("plots")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir_ / "plots" / "emissions.svg"));
    EXPECT_TRUE(fs::exists(dir_ / "plots" / "kpi_comparison.svg"));
}

TEST_F(CliTest, NonEmptyOutputRefused) {
    const auto config = write("case.yaml", small_config(2.0));
    fs::create_directories(dir_ / "out");
    write("out/keep.txt", "x");
    auto r = cli({"simulate", "--config", config, "--out", path("out"), "--quiet"});
    EXPECT_EQ(r.code, kExitUser);
    EXPECT_NE(error_record(r)["message"].get<std::string>().find("--force"), std::string::npos);
    r = cli({"simulate", "--config", config, "--out", path("out"), "--quiet", "--force"});
    EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(CliTest, InfeasibleWindowIsSolverFailure) {
    const auto config = write("short.yaml", small_config(8.0));
    const auto r = cli({"simulate", "--config", config, "--out", path("out"), "--quiet"});
    EXPECT_EQ(r.code, kExitSolver) << r.err;
    EXPECT_EQ(error_record(r)["error"], "solver");
}

TEST_F(CliTest, KpiOnMissingBundleIsIoError) {
    EXPECT_EQ(cli({"kpi", path("missing")}).code, kExitIo);
}

TEST_F(CliTest, ExportProblem) {
    const auto config = write("case.yaml", small_config(2.0));
    auto r = cli({"export-problem", "--config", config, "--at", "3", "--out", path("w.mps")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(read_text_file(path("w.mps")).find("ENDATA"), std::string::npos);
    r = cli({"export-problem", "--config", config, "--at", "0", "--out", path("w.lp")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(read_text_file(path("w.lp")).find("End"), std::string::npos);
    r = cli({"export-problem", "--config", config, "--at", "0", "--format", "xls", "--out", path("w.x")});
    EXPECT_EQ(r.code, kExitUser);
}
