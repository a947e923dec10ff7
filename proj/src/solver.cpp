#include "platopt/solver.hpp"

#include <Highs.h>

#include <chrono>
#include <cmath>
#include <cstdlib>

#include "platopt/errors.hpp"

namespace platopt {

std::string_view to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::Timeout: return "timeout";
        case SolveStatus::Error: return "error";
    }
    return "error";
}

namespace {

void configure(Highs& highs, double mip_gap, double time_limit) {
    highs.setOptionValue("output_flag", std::getenv("PLATOPT_SOLVER_LOG") != nullptr);
    highs.setOptionValue("log_to_console", std::getenv("PLATOPT_SOLVER_LOG") != nullptr);
    highs.setOptionValue("threads", 1);
    highs.setOptionValue("random_seed", 0);
    highs.setOptionValue("mip_rel_gap", mip_gap);
    highs.setOptionValue("mip_abs_gap", 1e-9);
    highs.setOptionValue("time_limit", time_limit);
    highs.setOptionValue("primal_feasibility_tolerance", 1e-9);
    highs.setOptionValue("dual_feasibility_tolerance", 1e-9);
    highs.setOptionValue("mip_feasibility_tolerance", 1e-9);
}

SolveStatus map_status(HighsModelStatus s) {
    switch (s) {
        case HighsModelStatus::kOptimal:
        case HighsModelStatus::kModelEmpty: return SolveStatus::Optimal;
        case HighsModelStatus::kInfeasible: return SolveStatus::Infeasible;
        case HighsModelStatus::kUnbounded:
        case HighsModelStatus::kUnboundedOrInfeasible: return SolveStatus::Unbounded;
        case HighsModelStatus::kTimeLimit:
        case HighsModelStatus::kIterationLimit:
        case HighsModelStatus::kSolutionLimit: return SolveStatus::Timeout;
        default: return SolveStatus::Error;
    }
}

Solution collect(Highs& highs, double seconds) {
    Solution out;
    out.wall_seconds = seconds;
    out.status = map_status(highs.getModelStatus());
    if (out.status == SolveStatus::Unbounded) {
        // presolve may not distinguish; resolve without it
        highs.setOptionValue("presolve", "off");
        highs.run();
        const auto s = map_status(highs.getModelStatus());
        if (s == SolveStatus::Infeasible) out.status = s;
    }
    if (out.status != SolveStatus::Optimal) return out;
    const auto& info = highs.getInfo();
    out.objective = info.objective_function_value;
    out.mip_gap = std::isfinite(info.mip_gap) ? info.mip_gap : 0.0;
    out.values = highs.getSolution().col_value;
    return out;
}

}  // namespace

std::string HighsBackend::name() const { return "highs-" + std::string(highsVersion()); }

Solution HighsBackend::solve(const MilpModel& model) {
    const auto& vars = model.variables();
    const auto& rows = model.constraints();
    HighsLp lp;
    lp.num_col_ = static_cast<HighsInt>(vars.size());
    lp.num_row_ = static_cast<HighsInt>(rows.size());
    lp.sense_ = ObjSense::kMinimize;
    lp.col_cost_.assign(vars.size(), 0.0);
    const LinearExpr objective = model.objective().normalized();
    for (const auto& t : objective.terms()) {
        lp.col_cost_[static_cast<std::size_t>(t.var.index)] = t.coef;
    }
    lp.offset_ = objective.constant();
    bool has_integer = false;
    lp.integrality_.resize(vars.size(), HighsVarType::kContinuous);
    for (std::size_t j = 0; j < vars.size(); ++j) {
        lp.col_lower_.push_back(vars[j].lower);
        lp.col_upper_.push_back(vars[j].upper);
        if (vars[j].kind == VarKind::Binary) {
            lp.integrality_[j] = HighsVarType::kInteger;
            has_integer = true;
        }
    }
    if (!has_integer) lp.integrality_.clear();
    lp.a_matrix_.format_ = MatrixFormat::kRowwise;
    lp.a_matrix_.num_col_ = lp.num_col_;
    lp.a_matrix_.num_row_ = lp.num_row_;
    lp.a_matrix_.start_.assign(1, 0);
    for (const auto& c : rows) {
        lp.row_lower_.push_back(c.lower);
        lp.row_upper_.push_back(c.upper);
        const LinearExpr expr = c.expr.normalized();
        for (const auto& t : expr.terms()) {
            lp.a_matrix_.index_.push_back(t.var.index);
            lp.a_matrix_.value_.push_back(t.coef);
        }
        lp.a_matrix_.start_.push_back(static_cast<HighsInt>(lp.a_matrix_.index_.size()));
    }

    Highs highs;
    configure(highs, mip_gap, time_limit_s);
    if (highs.passModel(std::move(lp)) == HighsStatus::kError) {
        throw SolverError("solver rejected the assembled problem", -1);
    }
    if (const char* dump = std::getenv("PLATOPT_SOLVER_DUMP")) highs.writeModel(dump);
    const auto start = std::chrono::steady_clock::now();
    highs.run();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return collect(highs, seconds);
}

Solution HighsBackend::solve_file(const std::string& path) {
    Highs highs;
    configure(highs, mip_gap, time_limit_s);
    if (highs.readModel(path) == HighsStatus::kError) {
        throw IoError("solver could not read '" + path + "'");
    }
    const auto start = std::chrono::steady_clock::now();
    highs.run();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return collect(highs, seconds);
}

std::unique_ptr<SolverBackend> make_default_backend() { return std::make_unique<HighsBackend>(); }

}  // namespace platopt
