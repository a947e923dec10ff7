#pragma once

#include <memory>
#include <string>
#include <vector>

#include "platopt/lp.hpp"

namespace platopt {

enum class SolveStatus { Optimal, Infeasible, Unbounded, Timeout, Error };

std::string_view to_string(SolveStatus status);

struct Solution {
    SolveStatus status = SolveStatus::Error;
    double objective = 0.0;
    std::vector<double> values;
    double mip_gap = 0.0;
    double wall_seconds = 0.0;

    bool ok() const { return status == SolveStatus::Optimal; }
};

struct BackendCapabilities {
    bool binaries = true;
    bool sos = false;
};

class SolverBackend {
public:
    virtual ~SolverBackend() = default;
    virtual std::string name() const = 0;
    virtual BackendCapabilities capabilities() const = 0;
    virtual Solution solve(const MilpModel& model) = 0;

    double mip_gap = 1e-4;
    double time_limit_s = 60.0;
};

/// Branch-and-cut backend built on the bundled HiGHS library. Runs single
/// threaded with a fixed random seed so repeated solves are reproducible.
class HighsBackend final : public SolverBackend {
public:
    std::string name() const override;
    BackendCapabilities capabilities() const override { return {true, false}; }
    Solution solve(const MilpModel& model) override;

    /// Read an LP or MPS file and solve it; only the objective is meaningful
    /// in the returned solution (column order follows the file).
    Solution solve_file(const std::string& path);
};

std::unique_ptr<SolverBackend> make_default_backend();

}  // namespace platopt
