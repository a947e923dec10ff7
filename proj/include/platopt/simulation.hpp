#pragma once

// Rolling-horizon loop: assemble a window, solve it, commit the first
// re-optimisation interval and carry the device states forward.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "platopt/assembly.hpp"
#include "platopt/model.hpp"
#include "platopt/solver.hpp"

namespace platopt {

struct WindowReport {
    int index = 0;
    int t0 = 0;
    int committed = 0;
    SolveStatus status = SolveStatus::Error;
    double objective = 0.0;
    double accounted_objective = 0.0;  // re-accounted from the solution values
    double mip_gap = 0.0;
    double max_residual = 0.0;         // independent substitution check
    double wall_seconds = 0.0;         // not persisted
};

/// Committed trajectories, keyed by series name, one value per step.
using SeriesMap = std::map<std::string, std::vector<double>>;

struct SimulationState {
    int step = 0;  // first step not yet committed
    BoundaryState boundary;
    SeriesMap series;
};

struct SimulationResult {
    int steps = 0;
    double timestep_minutes = 0.0;
    SeriesMap series;
    std::vector<WindowReport> windows;
    BoundaryState final_state;
};

/// Simulated span when the config does not fix one: every window fits in
/// the data, so the span is a whole number of re-optimisation intervals.
int default_span(const SimulationConfig& config, std::size_t data_length);

/// Extract the committed values of the first `steps` window steps into the
/// series and roll the boundary state forward.
SimulationState commit_window(SimulationState state, const EnergySystemModel& model,
                              const PlanningProblem& problem, const Solution& solution,
                              int steps);

/// Names of the series a window produces, in the order they are stored.
std::vector<std::string> series_names(const EnergySystemModel& model, const PlanningProblem& problem);

using ProgressCallback = std::function<void(const WindowReport&)>;

SimulationResult run_simulation(const EnergySystemModel& model, const SimulationConfig& config,
                                SolverBackend& backend, const ProgressCallback& progress = {});

/// Same, with the profile set given explicitly (the model's own profiles are ignored).
SimulationResult run_simulation(const EnergySystemModel& model, const SimulationConfig& config,
                                const TimeSeriesSet& profiles, SolverBackend& backend,
                                const ProgressCallback& progress = {});

}  // namespace platopt
