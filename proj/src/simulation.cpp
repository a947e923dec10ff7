#include "platopt/simulation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "platopt/errors.hpp"

namespace platopt {

namespace {

double binary(double v) { return std::round(v) == 0.0 ? 0.0 : 1.0; }

// Series values of one window step, in a fixed order.
std::vector<std::pair<std::string, double>> step_values(const EnergySystemModel& model,
                                                        const PlanningProblem& p,
                                                        const Solution* s, int k) {
    std::vector<std::pair<std::string, double>> out;
    auto val = [&](const LinearExpr& e) { return s ? value_of(*s, e) : 0.0; };
    const auto uk = static_cast<std::size_t>(k);
    for (std::size_t i = 0; i < model.devices.size(); ++i) {
        const auto& d = model.devices[i];
        const auto& v = p.devices[i];
        const std::string base = "dev." + d.id;
        for (const auto& [c, vars] : v.in) {
            out.emplace_back(fmt::format("{}.in.{}", base, to_string(c)), val(vars[uk]));
        }
        for (const auto& [c, vars] : v.out) {
            out.emplace_back(fmt::format("{}.out.{}", base, to_string(c)), val(vars[uk]));
        }
        out.emplace_back(base + ".flow", val(v.f(k)));
        if (d.profile) out.emplace_back(base + ".profile", v.pr(k));
        if (v.has_start_stop()) {
            out.emplace_back(base + ".on", binary(val(v.y_on[uk])));
            out.emplace_back(base + ".prep", binary(val(v.prep(k))));
            out.emplace_back(base + ".start", binary(val(v.y_start[uk])));
            out.emplace_back(base + ".stop", binary(val(v.y_stop[uk])));
        }
        if (!v.level.empty()) out.emplace_back(base + ".level", val(v.level[uk]));
        if (!v.p_max.empty()) out.emplace_back(base + ".pmax", val(v.p_max[uk]));
    }
    for (const auto& ev : p.network.edges) {
        const std::string base = "edge." + ev.edge->id;
        out.emplace_back(base + ".flow", val(ev.flow(k)));
        if (ev.lossy()) {
            out.emplace_back(base + ".loss_plus", val(ev.plus_loss(k)));
            out.emplace_back(base + ".loss_minus", val(ev.minus_loss(k)));
            out.emplace_back(base + ".qplus", val(ev.q_plus[uk]));
            out.emplace_back(base + ".qminus", val(ev.q_minus[uk]));
        }
    }
    for (const auto& nv : p.network.nodes) {
        const std::string base = "node." + nv.node->id;
        for (const auto& [c, vars] : nv.q_term) {
            out.emplace_back(fmt::format("{}.qterm.{}", base, to_string(c)), val(vars[uk]));
        }
        for (const auto& [c, vars] : nv.p_in) {
            out.emplace_back(fmt::format("{}.pressure.{}.in", base, to_string(c)), val(vars[uk]));
        }
        for (const auto& [c, vars] : nv.p_out) {
            out.emplace_back(fmt::format("{}.pressure.{}.out", base, to_string(c)),
                             val(vars[uk]));
        }
        if (!nv.angle.empty()) out.emplace_back(base + ".angle", val(nv.angle[uk]));
        if (!nv.slack.empty()) out.emplace_back(base + ".slack", val(nv.slack[uk]));
    }
    if (!p.reserve_slack.empty()) {
        out.emplace_back("system.reserve_slack", val(p.reserve_slack[uk]));
    }
    return out;
}

}  // namespace

std::vector<std::string> series_names(const EnergySystemModel& model,
                                      const PlanningProblem& problem) {
    std::vector<std::string> names;
    for (auto& [name, _] : step_values(model, problem, nullptr, 0)) names.push_back(name);
    return names;
}

int default_span(const SimulationConfig& config, std::size_t data_length) {
    const long length = static_cast<long>(data_length);
    const long h = config.horizon_steps;
    const long r = config.reoptimisation_steps;
    if (length < h || r < 1) return 0;
    return static_cast<int>(((length - h) / r + 1) * r);
}

SimulationState commit_window(SimulationState state, const EnergySystemModel& model,
                              const PlanningProblem& problem, const Solution& solution,
                              int steps) {
    if (state.step != problem.t0) {
        throw AssemblyError(fmt::format("state is at step {}, solution starts at {}", state.step,
                                        problem.t0));
    }
    if (steps < 1 || steps > problem.horizon) {
        throw AssemblyError(fmt::format("cannot commit {} steps of a {}-step window", steps,
                                        problem.horizon));
    }
    if (solution.values.size() != problem.milp.variables().size()) {
        throw AssemblyError("solution does not match the problem");
    }
    for (int k = 0; k < steps; ++k) {
        for (auto& [name, value] : step_values(model, problem, &solution, k)) {
            auto& series = state.series[name];
            series.resize(static_cast<std::size_t>(state.step + k), 0.0);
            series.push_back(value);
        }
    }

    BoundaryState next;
    next.t0 = problem.t0 + steps;
    for (std::size_t i = 0; i < model.devices.size(); ++i) {
        const auto& d = model.devices[i];
        const auto& v = problem.devices[i];
        DeviceHistory h;
        const int last = steps - 1;
        h.flow = value_of(solution, v.f(last));
        if (v.has_start_stop()) {
            h.on = static_cast<int>(binary(value_of(solution, v.y_on[static_cast<std::size_t>(last)])));
            const int ts = d.start_stop->delay_steps;
            for (int j = 0; j < ts; ++j) {
                const int k = last - j;
                h.starts.push_back(static_cast<int>(binary(value_of(solution, v.start(k)))));
            }
        }
        if (!v.level.empty()) h.level = value_of(solution, v.level[static_cast<std::size_t>(last)]);
        next.devices[d.id] = std::move(h);
    }
    state.boundary = std::move(next);
    state.step += steps;
    return state;
}

SimulationResult run_simulation(const EnergySystemModel& model, const SimulationConfig& config,
                                SolverBackend& backend, const ProgressCallback& progress) {
    return run_simulation(model, config, model.profiles, backend, progress);
}

SimulationResult run_simulation(const EnergySystemModel& model, const SimulationConfig& config,
                                const TimeSeriesSet& input_profiles, SolverBackend& backend,
                                const ProgressCallback& progress) {
    TimeSeriesSet profiles = input_profiles;
    apply_forecast_noise(profiles, config);
    backend.mip_gap = config.solver.mip_gap;
    backend.time_limit_s = config.solver.time_limit_s;

    const int span = config.steps ? *config.steps : default_span(config, profiles.length());
    SimulationResult result;
    result.steps = span;
    result.timestep_minutes = config.timestep_minutes;

    SimulationState state;
    state.boundary = BoundaryState::initial(model);
    int index = 0;
    for (int t0 = 0; t0 < span; t0 += config.reoptimisation_steps, ++index) {
        const PlanningProblem problem = assemble(model, config, profiles, state.boundary, t0);
        const Solution solution = solve(problem, backend);
        WindowReport report;
        report.index = index;
        report.t0 = t0;
        report.status = solution.status;
        report.wall_seconds = solution.wall_seconds;
        if (!solution.ok()) {
            if (progress) progress(report);
            throw SolverError(fmt::format("window {} {}", index, to_string(solution.status)), t0);
        }
        report.committed = std::min(config.reoptimisation_steps, span - t0);
        report.objective = solution.objective;
        report.accounted_objective = account_objective(model, problem, solution).total();
        report.mip_gap = solution.mip_gap;
        report.max_residual = max_residual(problem.milp, solution.values);
        state = commit_window(std::move(state), model, problem, solution, report.committed);
        result.windows.push_back(report);
        if (progress) progress(report);
    }
    result.series = std::move(state.series);
    result.final_state = std::move(state.boundary);
    return result;
}

}  // namespace platopt
