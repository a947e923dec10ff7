#include "platopt/assembly.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "platopt/errors.hpp"

namespace platopt {

BoundaryState BoundaryState::initial(const EnergySystemModel& model) {
    BoundaryState b;
    for (const auto& d : model.devices) b.devices[d.id] = initial_history(d);
    return b;
}

// ------------------------------------------------------------------- penalty

double evaluate_penalty(const PenaltyCurve& curve, double flow, double on, double prep) {
    const auto& bp = curve.breakpoints;
    if (bp.size() < 2) throw DomainError("penalty curve needs at least two breakpoints");
    const double tol = 1e-9 * std::max(1.0, std::abs(bp.back().flow));
    if (flow < bp.front().flow - tol || flow > bp.back().flow + tol) {
        throw DomainError(fmt::format("flow {} outside penalty curve domain [{}, {}]", flow,
                                      bp.front().flow, bp.back().flow));
    }
    std::size_t i = 1;
    while (i + 1 < bp.size() && flow > bp[i].flow) ++i;
    const auto& a = bp[i - 1];
    const auto& b = bp[i];
    const double value = a.penalty + (b.penalty - a.penalty) * (flow - a.flow) / (b.flow - a.flow);
    return value + curve.on_cost * on + curve.prep_cost * prep;
}

LinearExpr encode_penalty(MilpModel& milp, const PenaltyCurve& curve, const LinearExpr& flow,
                          const LinearExpr& on, const LinearExpr& prep, const std::string& name) {
    const auto& bp = curve.breakpoints;
    if (bp.size() < 2) throw DomainError("penalty curve needs at least two breakpoints");
    LinearExpr cost = curve.on_cost * on + curve.prep_cost * prep;
    milp.add_constraint(greater_equal(name + ".domain_lo", flow, bp.front().flow));
    milp.add_constraint(less_equal(name + ".domain_hi", flow, bp.back().flow));

    if (bp.size() == 2) {
        const double slope = (bp[1].penalty - bp[0].penalty) / (bp[1].flow - bp[0].flow);
        return cost + (bp[0].penalty + slope * (flow - bp[0].flow));
    }
    if (curve.is_convex()) {
        // epigraph: the cost variable sits on the upper envelope at the optimum
        const VarId p = milp.add_continuous(name + ".value", -kInf, kInf);
        for (std::size_t i = 1; i < bp.size(); ++i) {
            const double slope =
                (bp[i].penalty - bp[i - 1].penalty) / (bp[i].flow - bp[i - 1].flow);
            milp.add_constraint(greater_equal(fmt::format("{}.segment{}", name, i), p,
                                              bp[i - 1].penalty + slope * (flow - bp[i - 1].flow)));
        }
        return cost + p;
    }
    // convex combination with adjacency binaries
    const std::size_t n = bp.size();
    std::vector<VarId> lambda;
    std::vector<VarId> segment;
    for (std::size_t i = 0; i < n; ++i) {
        lambda.push_back(milp.add_continuous(fmt::format("{}.lambda{}", name, i), 0.0, 1.0));
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        segment.push_back(milp.add_binary(fmt::format("{}.segment{}", name, i)));
    }
    LinearExpr x;
    LinearExpr value;
    LinearExpr lambda_sum;
    LinearExpr segment_sum;
    for (std::size_t i = 0; i < n; ++i) {
        x.add(lambda[i], bp[i].flow);
        value.add(lambda[i], bp[i].penalty);
        lambda_sum.add(lambda[i], 1.0);
        LinearExpr adjacent;
        if (i > 0) adjacent.add(segment[i - 1], 1.0);
        if (i + 1 < n) adjacent.add(segment[i], 1.0);
        milp.add_constraint(less_equal(fmt::format("{}.adjacent{}", name, i), lambda[i], adjacent));
    }
    for (VarId z : segment) segment_sum.add(z, 1.0);
    milp.add_constraint(equal(name + ".flow", flow, x));
    milp.add_constraint(equal(name + ".convex", lambda_sum, 1.0));
    milp.add_constraint(equal(name + ".one_segment", segment_sum, 1.0));
    return cost + value;
}

// ------------------------------------------------------------ global limits

namespace {

bool has_carrier(const std::vector<Carrier>& list, Carrier c) {
    return std::find(list.begin(), list.end(), c) != list.end();
}

}  // namespace

LinearExpr reserve_expression(const EnergySystemModel& model, const PlanningProblem& problem,
                              int k) {
    LinearExpr sum;
    for (std::size_t i = 0; i < model.devices.size(); ++i) {
        const DeviceSpec& d = model.devices[i];
        const DeviceVariables& v = problem.devices[i];
        if (d.reserve_factor > 0.0 && has_carrier(device_outputs(d), Carrier::Electricity)) {
            LinearExpr available = d.type() == DeviceType::Battery
                                       ? LinearExpr(v.p_max[static_cast<std::size_t>(k)])
                                       : d.flow_max * v.pr(k) * v.on(k);
            sum.add(available - v.out_flow(Carrier::Electricity, k), d.reserve_factor);
        }
        if (d.load_reserve_factor > 0.0 && has_carrier(device_inputs(d), Carrier::Electricity)) {
            sum.add(v.in_flow(Carrier::Electricity, k), d.load_reserve_factor);
        }
    }
    return sum;
}

Constraint reserve_constraint(const EnergySystemModel& model, const PlanningProblem& problem,
                              int k, double reserve_min) {
    LinearExpr lhs = reserve_expression(model, problem, k);
    if (!problem.reserve_slack.empty()) lhs += problem.reserve_slack[static_cast<std::size_t>(k)];
    return greater_equal(fmt::format("system.reserve.t{}", problem.t0 + k), lhs, reserve_min);
}

LinearExpr emission_expression(const EnergySystemModel& model, const PlanningProblem& problem,
                               int k) {
    LinearExpr sum;
    const double co2 = model.carrier(Carrier::Gas).co2_content.value_or(0.0);
    for (std::size_t i = 0; i < model.devices.size(); ++i) {
        if (!is_gas_combusting(model.devices[i])) continue;
        const auto& v = problem.devices[i];
        sum.add(v.in_flow(Carrier::Gas, k) - v.out_flow(Carrier::Gas, k), co2);
    }
    return sum;
}

Constraint emission_rate_constraint(const EnergySystemModel& model,
                                    const PlanningProblem& problem, int k, double cap) {
    return less_equal(fmt::format("system.emission.t{}", problem.t0 + k),
                      emission_expression(model, problem, k), cap);
}

// ------------------------------------------------------------------ assembly

PlanningProblem assemble(const EnergySystemModel& model, const SimulationConfig& config,
                         const TimeSeriesSet& profiles, const BoundaryState& boundary, int t0) {
    const int horizon = config.horizon_steps;
    if (horizon < 1) throw AssemblyError("horizon must be >= 1 step");
    if (boundary.t0 != t0) {
        throw AssemblyError(fmt::format("boundary state is for step {}, window starts at {}",
                                        boundary.t0, t0));
    }
    PlanningProblem problem;
    problem.t0 = t0;
    problem.horizon = horizon;
    problem.boundary = boundary;
    problem.profiles = forecast_view(profiles, t0, horizon, config.nowcast_steps);
    MilpModel& milp = problem.milp;

    for (const auto& d : model.devices) {
        auto it = boundary.devices.find(d.id);
        if (it == boundary.devices.end()) {
            throw AssemblyError("boundary state has no history for device " + d.id);
        }
        if (is_storage(d.type()) && !it->second.level) {
            throw AssemblyError("boundary state has no storage level for device " + d.id);
        }
        DeviceVariables v = create_device_variables(milp, d, it->second, t0, horizon);
        if (d.profile) {
            auto pv = problem.profiles.find(*d.profile);
            if (pv == problem.profiles.end()) {
                throw AssemblyError("device " + d.id + " references unknown profile " + *d.profile);
            }
            v.profile = pv->second;
        }
        problem.devices.push_back(std::move(v));
    }
    problem.network = create_network_variables(milp, model, t0, horizon, config.elastic);
    for (std::size_t i = 0; i < model.devices.size(); ++i) {
        const auto& node = model.devices[i].node;
        for (const auto& nv : problem.network.nodes) {
            if (nv.node->id != node) continue;
            problem.devices[i].p_in = nv.p_in;
            problem.devices[i].p_out = nv.p_out;
        }
    }
    if (config.elastic) {
        for (int k = 0; k < horizon; ++k) {
            problem.reserve_slack.push_back(
                milp.add_continuous(fmt::format("system.reserve_slack.t{}", t0 + k)));
        }
    }

    const DeviceContext ctx{&model, config.timestep_hours(), config.timestep_seconds()};
    LinearExpr objective;
    for (std::size_t i = 0; i < model.devices.size(); ++i) {
        const DeviceSpec& d = model.devices[i];
        const DeviceVariables& v = problem.devices[i];
        for (int k = 0; k < horizon; ++k) {
            milp.add_constraints(generic_device_constraints(d, v, k));
            milp.add_constraints(device_constraints(d, v, ctx, k));
            if (d.penalty) {
                objective += encode_penalty(milp, *d.penalty, v.f(k), v.on(k), v.prep(k),
                                            fmt::format("dev.{}.penalty.t{}", d.id, t0 + k));
                objective.add(v.f(k), kTieBreakScale * static_cast<double>(i + 1));
            }
            if (d.start_stop) {
                const auto uk = static_cast<std::size_t>(k);
                objective.add(v.y_start[uk], d.start_stop->start_penalty);
                objective.add(v.y_stop[uk], d.start_stop->stop_penalty);
            }
        }
        if (is_storage(d.type())) objective.add(v.deviation, d.storage_penalty);
    }
    for (int k = 0; k < horizon; ++k) {
        milp.add_constraints(
            network_constraints(model, problem.network, problem.devices, config.s_base, k));
        milp.add_constraint(reserve_constraint(model, problem, k, config.reserve_min));
        if (config.emission_cap) {
            milp.add_constraint(emission_rate_constraint(model, problem, k, *config.emission_cap));
        }
    }
    for (const auto& ev : problem.network.edges) {
        for (std::size_t k = 0; k < ev.loss_plus.size(); ++k) {
            objective.add(ev.loss_plus[k], kTieBreakScale);
            objective.add(ev.loss_minus[k], kTieBreakScale);
        }
    }
    for (const auto& nv : problem.network.nodes) {
        for (VarId s : nv.slack) objective.add(s, kSlackCost);
    }
    for (VarId s : problem.reserve_slack) objective.add(s, kSlackCost);
    milp.add_objective(objective);
    return problem;
}

Solution solve(const PlanningProblem& problem, SolverBackend& backend) {
    return backend.solve(problem.milp);
}

double value_of(const Solution& s, VarId v) { return s.values.at(static_cast<std::size_t>(v.index)); }

double value_of(const Solution& s, const LinearExpr& e) { return e.evaluate(s.values); }

ObjectiveBreakdown account_objective(const EnergySystemModel& model,
                                     const PlanningProblem& problem, const Solution& solution) {
    ObjectiveBreakdown out;
    for (std::size_t i = 0; i < model.devices.size(); ++i) {
        const DeviceSpec& d = model.devices[i];
        const DeviceVariables& v = problem.devices[i];
        for (int k = 0; k < problem.horizon; ++k) {
            const double f = value_of(solution, v.f(k));
            if (d.penalty) {
                // snap into the domain: the solver may sit a tolerance outside
                const auto& bp = d.penalty->breakpoints;
                const double flow = std::clamp(f, bp.front().flow, bp.back().flow);
                out.penalty += evaluate_penalty(*d.penalty, flow, value_of(solution, v.on(k)),
                                                value_of(solution, v.prep(k)));
                out.tie_break += kTieBreakScale * static_cast<double>(i + 1) * f;
            }
            if (d.start_stop) {
                const auto uk = static_cast<std::size_t>(k);
                out.start_stop += d.start_stop->start_penalty * value_of(solution, v.y_start[uk]) +
                                  d.start_stop->stop_penalty * value_of(solution, v.y_stop[uk]);
            }
        }
        if (is_storage(d.type())) {
            // the deficit the solution should carry is max(0, target - E_end)
            const double end = value_of(solution, v.storage_level(problem.horizon - 1));
            const double deficit = std::max(0.0, storage_target(d, v.history) - end);
            out.storage += d.storage_penalty * deficit;
        }
    }
    for (const auto& ev : problem.network.edges) {
        for (std::size_t k = 0; k < ev.loss_plus.size(); ++k) {
            out.tie_break += kTieBreakScale * (value_of(solution, ev.loss_plus[k]) +
                                               value_of(solution, ev.loss_minus[k]));
        }
    }
    for (const auto& nv : problem.network.nodes) {
        for (VarId s : nv.slack) out.slack += kSlackCost * value_of(solution, s);
    }
    for (VarId s : problem.reserve_slack) out.slack += kSlackCost * value_of(solution, s);
    return out;
}

}  // namespace platopt
