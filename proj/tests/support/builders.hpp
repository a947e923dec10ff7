#pragma once

// Small in-code models for unit tests.

#include <filesystem>
#include <string>
#include <vector>

#include "platopt/assembly.hpp"
#include "platopt/devices.hpp"
#include "platopt/model.hpp"
#include "platopt/solver.hpp"

namespace build {

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(PLATOPT_FIXTURES_DIR) / name;
}

inline platopt::Node node(std::string id) {
    platopt::Node n;
    n.id = std::move(id);
    return n;
}

inline platopt::Edge edge(std::string id, platopt::Carrier c, std::string from, std::string to) {
    platopt::Edge e;
    e.id = std::move(id);
    e.carrier = c;
    e.from = std::move(from);
    e.to = std::move(to);
    return e;
}

inline platopt::DeviceSpec source(std::string id, std::string at, platopt::Carrier c,
                                  double flow_max, double flow_min = 0.0) {
    platopt::DeviceSpec d;
    d.id = std::move(id);
    d.node = std::move(at);
    d.params = platopt::SourceParams{c};
    d.flow_max = flow_max;
    d.flow_min = flow_min;
    return d;
}

inline platopt::DeviceSpec sink(std::string id, std::string at, platopt::Carrier c,
                                double flow_max, double flow_min = 0.0) {
    platopt::DeviceSpec d;
    d.id = std::move(id);
    d.node = std::move(at);
    d.params = platopt::SinkParams{c};
    d.flow_max = flow_max;
    d.flow_min = flow_min;
    return d;
}

inline platopt::DeviceSpec gas_turbine(std::string id, std::string at, double flow_max,
                                       double flow_min, int delay) {
    platopt::DeviceSpec d;
    d.id = std::move(id);
    d.node = std::move(at);
    d.params = platopt::GasTurbineParams{2.6, 0.4, 0.6};
    d.flow_max = flow_max;
    d.flow_min = flow_min;
    d.start_stop = platopt::StartStop{delay, 1.0, 0.0};
    d.penalty = platopt::PenaltyCurve{{{0.0, 0.0}, {flow_max, 3.3}}, 0.5, 0.5};
    d.reserve_factor = 1.0;
    return d;
}

inline platopt::CarrierProperties gas_properties() {
    platopt::CarrierProperties p;
    p.calorific_value = 40.0;
    p.co2_content = 2.34;
    return p;
}

inline platopt::SimulationConfig config(int horizon, int reopt, int steps) {
    platopt::SimulationConfig c;
    c.timestep_minutes = 5.0;
    c.horizon_steps = horizon;
    c.reoptimisation_steps = reopt;
    c.steps = steps;
    c.solver.mip_gap = 0.0;
    return c;
}

/// Variables and rows of a single device over a short window.
struct DeviceProblem {
    platopt::MilpModel milp;
    platopt::DeviceVariables vars;
};

inline DeviceProblem device_problem(const platopt::EnergySystemModel& model,
                                    const platopt::DeviceSpec& spec,
                                    const platopt::DeviceHistory& history, int horizon,
                                    double dt_hours = 1.0, std::vector<double> profile = {}) {
    DeviceProblem p;
    p.vars = platopt::create_device_variables(p.milp, spec, history, 0, horizon);
    p.vars.profile = std::move(profile);
    platopt::DeviceContext ctx{&model, dt_hours, dt_hours * 3600.0};
    for (int k = 0; k < horizon; ++k) {
        p.milp.add_constraints(platopt::generic_device_constraints(spec, p.vars, k));
        p.milp.add_constraints(platopt::device_constraints(spec, p.vars, ctx, k));
    }
    return p;
}

inline platopt::Solution solve_exact(const platopt::MilpModel& milp) {
    platopt::HighsBackend backend;
    backend.mip_gap = 0.0;
    return backend.solve(milp);
}

inline double value(const platopt::Solution& s, const platopt::LinearExpr& e) {
    return e.evaluate(s.values);
}

}  // namespace build
