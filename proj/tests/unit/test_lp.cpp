#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "builders.hpp"
#include "oracles.hpp"
#include "platopt/lp.hpp"
#include "platopt/solver.hpp"

using namespace platopt;

namespace {

// max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x <= 3  ->  x = 3, y = 1, obj 11
MilpModel small_lp() {
    MilpModel m;
    const auto x = m.add_continuous("x", 0.0, 3.0);
    const auto y = m.add_continuous("y");
    m.add_constraint(less_equal("c1", LinearExpr(x) + LinearExpr(y), 4.0));
    m.add_constraint(less_equal("c2", LinearExpr(x) + 3.0 * LinearExpr(y), 6.0));
    m.add_objective(LinearExpr(x) * -3.0 + LinearExpr(y) * -2.0);
    return m;
}

MilpModel small_milp() {
    MilpModel m;
    const auto on = m.add_binary("on");
    const auto f = m.add_continuous("f", 0.0, 10.0);
    const auto backup = m.add_continuous("backup", 0.0, 10.0);
    m.add_constraint(equal("demand", LinearExpr(f) + LinearExpr(backup), 6.0));
    m.add_constraint(less_equal("cap", LinearExpr(f), 10.0 * LinearExpr(on)));
    m.add_constraint(greater_equal("min", LinearExpr(f), 2.0 * LinearExpr(on)));
    m.add_objective(LinearExpr(on) * 3.0 + LinearExpr(f) * 1.0 + LinearExpr(backup) * 2.0);
    return m;
}

std::string as_lp(const MilpModel& m) {
    std::ostringstream s;
    write_lp(m, s);
    return s.str();
}

std::string as_mps(const MilpModel& m) {
    std::ostringstream s;
    write_mps(m, s);
    return s.str();
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("platopt_test_" + name);
}

}  // namespace

TEST(LinearExpr, NormalizeMergesTerms) {
    const VarId a{0}, b{1};
    LinearExpr e = LinearExpr(b, 2.0) + LinearExpr(a, 1.0) + LinearExpr(b, -2.0) + 5.0;
    const auto n = e.normalized();
    ASSERT_EQ(n.terms().size(), 1u);
    EXPECT_EQ(n.terms()[0].var, a);
    EXPECT_EQ(n.constant(), 5.0);
    const std::vector<double> v{2.0, 7.0};
    EXPECT_DOUBLE_EQ(e.evaluate(v), 7.0);
}

TEST(CheckSolution, ReportsViolatedRowsAndBounds) {
    const auto m = small_lp();
    EXPECT_TRUE(check_solution(m, std::vector<double>{3.0, 1.0}).empty());
    const auto bad = check_solution(m, std::vector<double>{4.0, 1.0});
    // both rows and the upper bound on x
    ASSERT_EQ(bad.size(), 3u);
    EXPECT_NEAR(max_residual(m, std::vector<double>{4.0, 1.0}), 1.0, 1e-12);
}

TEST(HighsBackend, SolvesSmallLp) {
    const auto s = build::solve_exact(small_lp());
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(s.objective, -11.0, 1e-9);
    EXPECT_NEAR(s.values[0], 3.0, 1e-9);
    EXPECT_NEAR(s.values[1], 1.0, 1e-9);
}

TEST(HighsBackend, AgreesWithDenseOracle) {
    const auto m = small_lp();
    const std::vector<double> lo{0.0, 0.0}, hi{3.0, kInf};
    const auto ref = oracle::solve_dense_lp(m, lo, hi);
    ASSERT_EQ(ref.status, oracle::LpStatus::Optimal);
    EXPECT_NEAR(build::solve_exact(m).objective, ref.objective, 1e-9);
}

TEST(HighsBackend, MilpAgreesWithEnumeration) {
    const auto m = small_milp();
    const auto ref = oracle::enumerate_binaries(m);
    ASSERT_TRUE(ref.feasible);
    EXPECT_EQ(ref.patterns, 2u);
    // on: 3 + 6 = 9, off: 12
    EXPECT_NEAR(ref.objective, 9.0, 1e-9);
    EXPECT_NEAR(build::solve_exact(m).objective, ref.objective, 1e-9);
}

TEST(HighsBackend, EmptyProblemHasZeroObjective) {
    const auto s = build::solve_exact(MilpModel{});
    EXPECT_TRUE(s.ok());
    EXPECT_EQ(s.objective, 0.0);
}

TEST(HighsBackend, DemandAboveCapacityIsInfeasible) {
    MilpModel m;
    const auto f = m.add_continuous("f", 0.0, 5.0);
    m.add_constraint(greater_equal("reserve", LinearExpr(f), 8.0));
    const auto s = build::solve_exact(m);
    EXPECT_EQ(s.status, SolveStatus::Infeasible);
    EXPECT_EQ(oracle::solve_dense_lp(m, std::vector<double>{0.0}, std::vector<double>{5.0}).status,
              oracle::LpStatus::Infeasible);
}

TEST(HighsBackend, FixedVariablesHonoured) {
    auto m = small_milp();
    m.fix(VarId{0}, 0.0);
    const auto s = build::solve_exact(m);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(s.objective, 12.0, 1e-9);
}

TEST(Export, LpAndMpsAreDeterministic) {
    EXPECT_EQ(as_lp(small_milp()), as_lp(small_milp()));
    EXPECT_EQ(as_mps(small_milp()), as_mps(small_milp()));
}

TEST(Export, MpsMarksIntegerColumns) {
    const auto text = as_mps(small_milp());
    EXPECT_NE(text.find("'INTORG'"), std::string::npos);
    EXPECT_NE(text.find("'INTEND'"), std::string::npos);
    EXPECT_NE(text.find("ROWS"), std::string::npos);
    EXPECT_NE(text.find("ENDATA"), std::string::npos);
}

TEST(Export, LpDeclaresBinaries) {
    const auto text = as_lp(small_milp());
    EXPECT_NE(text.find("Minimize"), std::string::npos);
    EXPECT_NE(text.find("on"), std::string::npos);
    EXPECT_NE(text.find("End"), std::string::npos);
}

TEST(Export, FilesSolveToSameObjective) {
    const auto m = small_milp();
    const double expected = build::solve_exact(m).objective;
    HighsBackend backend;
    backend.mip_gap = 0.0;
    for (const auto& [fmt, ext] : {std::pair{ExportFormat::Lp, ".lp"}, std::pair{ExportFormat::Mps, ".mps"}}) {
        const auto path = temp_file(std::string("roundtrip") + ext);
        export_problem(m, fmt, path.string());
        const auto s = backend.solve_file(path.string());
        ASSERT_TRUE(s.ok()) << ext;
        EXPECT_NEAR(s.objective, expected, 1e-9) << ext;
        std::filesystem::remove(path);
    }
}

TEST(Export, LargerModelRoundTripsThroughMps) {
    MilpModel m;
    std::vector<VarId> x;
    for (int i = 0; i < 30; ++i) {
        x.push_back(i % 3 == 0 ? m.add_binary("b" + std::to_string(i))
                               : m.add_continuous("x" + std::to_string(i), -2.0, 7.5));
    }
    for (int r = 0; r < 20; ++r) {
        LinearExpr e;
        for (int j = 0; j < 30; ++j) {
            if ((r * 7 + j * 3) % 5 == 0) e.add(x[j], 1.0 + 0.25 * ((r + j) % 4) - 0.6);
        }
        m.add_constraint(less_equal("r" + std::to_string(r), e, 4.0 + r % 3));
    }
    LinearExpr obj;
    for (int j = 0; j < 30; ++j) obj.add(x[j], (j % 2 ? 1.0 : -1.0) * (1.0 + 0.1 * j));
    m.add_objective(obj);

    const auto direct = build::solve_exact(m);
    ASSERT_TRUE(direct.ok());
    const auto path = temp_file("larger.mps");
    export_problem(m, ExportFormat::Mps, path.string());
    HighsBackend backend;
    backend.mip_gap = 0.0;
    const auto s = backend.solve_file(path.string());
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(s.objective, direct.objective, 1e-7);
    std::filesystem::remove(path);
}

TEST(DenseOracle, DetectsUnbounded) {
    MilpModel m;
    const auto x = m.add_continuous("x", 0.0, kInf);
    m.add_objective(LinearExpr(x) * -1.0);
    EXPECT_EQ(oracle::solve_dense_lp(m, std::vector<double>{0.0}, std::vector<double>{kInf}).status,
              oracle::LpStatus::Unbounded);
}

TEST(DenseOracle, HandlesFreeVariablesAndEqualities) {
    MilpModel m;
    const auto x = m.add_continuous("x", -kInf, kInf);
    const auto y = m.add_continuous("y", 0.0, kInf);
    m.add_constraint(equal("e", LinearExpr(x) + LinearExpr(y), -3.0));
    m.add_objective(LinearExpr(y));
    const auto r = oracle::solve_dense_lp(m, std::vector<double>{-kInf, 0.0},
                                          std::vector<double>{kInf, kInf});
    ASSERT_EQ(r.status, oracle::LpStatus::Optimal);
    EXPECT_NEAR(r.objective, 0.0, 1e-12);
    EXPECT_NEAR(r.x[0], -3.0, 1e-12);
}
