#pragma once

// One planning window as a MILP: variables for every device, node and edge,
// all constraints, the penalty objective, and re-accounting of a solution.

#include <map>
#include <string>
#include <vector>

#include "platopt/devices.hpp"
#include "platopt/lp.hpp"
#include "platopt/model.hpp"
#include "platopt/network.hpp"
#include "platopt/solver.hpp"

namespace platopt {

inline constexpr double kTieBreakScale = 1e-6;
inline constexpr double kSlackCost = 1e4;

/// Device states just before a window starts.
struct BoundaryState {
    int t0 = 0;
    std::map<std::string, DeviceHistory> devices;

    static BoundaryState initial(const EnergySystemModel& model);
    bool operator==(const BoundaryState&) const = default;
};

struct PlanningProblem {
    int t0 = 0;
    int horizon = 0;
    MilpModel milp;
    BoundaryState boundary;
    std::vector<DeviceVariables> devices;  // aligned with model.devices
    NetworkVariables network;
    std::vector<VarId> reserve_slack;      // elastic mode only
    std::map<std::string, std::vector<double>> profiles;  // pr values of the window
};

/// P(f) + on_cost y_on + prep_cost y_prep; flow outside the curve throws.
double evaluate_penalty(const PenaltyCurve& curve, double flow, double on, double prep);

/// Encode the penalty of one step into the problem and return its cost
/// expression (adds helper variables/rows when the curve needs them).
LinearExpr encode_penalty(MilpModel& milp, const PenaltyCurve& curve, const LinearExpr& flow,
                          const LinearExpr& on, const LinearExpr& prep,
                          const std::string& name);

/// Total available reserve at step k as an expression.
LinearExpr reserve_expression(const EnergySystemModel& model, const PlanningProblem& problem,
                              int k);
Constraint reserve_constraint(const EnergySystemModel& model, const PlanningProblem& problem,
                              int k, double reserve_min);

/// Emission rate (kg/s) at step k as an expression.
LinearExpr emission_expression(const EnergySystemModel& model, const PlanningProblem& problem,
                               int k);
Constraint emission_rate_constraint(const EnergySystemModel& model,
                                    const PlanningProblem& problem, int k, double cap);

PlanningProblem assemble(const EnergySystemModel& model, const SimulationConfig& config,
                         const TimeSeriesSet& profiles, const BoundaryState& boundary, int t0);

/// Status and values from the backend. Non-optimal statuses are returned,
/// not thrown; SolverError is for callers that cannot continue.
Solution solve(const PlanningProblem& problem, SolverBackend& backend);

double value_of(const Solution& s, VarId v);
double value_of(const Solution& s, const LinearExpr& e);

struct ObjectiveBreakdown {
    double penalty = 0.0;
    double start_stop = 0.0;
    double storage = 0.0;
    double tie_break = 0.0;
    double slack = 0.0;
    double total() const { return penalty + start_stop + storage + tie_break + slack; }
};

/// Recompute the objective from the solution values using evaluate_penalty
/// rather than the encoded rows.
ObjectiveBreakdown account_objective(const EnergySystemModel& model,
                                     const PlanningProblem& problem, const Solution& solution);

}  // namespace platopt
