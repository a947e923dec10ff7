#include <gtest/gtest.h>

#include "builders.hpp"
#include "platopt/errors.hpp"
#include "platopt/network.hpp"
#include "platopt/physics.hpp"

using namespace platopt;

namespace {

struct Window {
    PlanningProblem problem;
    Solution solution;
};

Window solve_window(const EnergySystemModel& m, SimulationConfig c = build::config(1, 1, 1)) {
    Window w;
    w.problem = assemble(m, c, TimeSeriesSet{}, BoundaryState::initial(m), 0);
    w.solution = build::solve_exact(w.problem.milp);
    return w;
}

double edge_flow(const Window& w, std::size_t e) {
    return value_of(w.solution, w.problem.network.edges[e].flow(0));
}

Node pressure_node(std::string id, Carrier c, double nominal, std::optional<double> delta) {
    Node n = build::node(std::move(id));
    n.pressures[c] = NodePressure{nominal, std::nullopt, delta};
    return n;
}

// a single gas source so the node carries gas
EnergySystemModel gas_node_model(std::optional<double> delta) {
    EnergySystemModel m;
    m.nodes = {pressure_node("N", Carrier::Gas, 20.0, delta)};
    m.devices = {build::source("src", "N", Carrier::Gas, 10.0)};
    return m;
}

std::pair<double, double> pressure_range(const EnergySystemModel& m) {
    std::pair<double, double> range;
    for (double sign : {1.0, -1.0}) {
        MilpModel milp;
        const auto net = create_network_variables(milp, m, 0, 1, false);
        milp.add_constraints(pressure_band_constraints(net.nodes[0], Carrier::Gas, 0, 0));
        const VarId p = net.nodes[0].p_in.at(Carrier::Gas)[0];
        milp.add_objective(LinearExpr(p), sign);
        const auto s = build::solve_exact(milp);
        EXPECT_TRUE(s.ok());
        (sign > 0 ? range.first : range.second) = value_of(s, p);
    }
    return range;
}

std::pair<double, double> edge_range(const Edge& e) {
    EnergySystemModel m;
    m.nodes = {build::node(e.from), build::node(e.to)};
    m.edges = {e};
    std::pair<double, double> range;
    for (double sign : {1.0, -1.0}) {
        MilpModel milp;
        const auto net = create_network_variables(milp, m, 0, 1, false);
        milp.add_constraints(edge_limit_constraints(net.edges[0], 0, 0));
        milp.add_constraint(less_equal("cap", net.edges[0].flow(0), 1e3));
        milp.add_constraint(greater_equal("floor", net.edges[0].flow(0), -1e3));
        milp.add_objective(net.edges[0].flow(0), sign);
        const auto s = build::solve_exact(milp);
        EXPECT_TRUE(s.ok());
        (sign > 0 ? range.first : range.second) = value_of(s, net.edges[0].flow(0));
    }
    return range;
}

}  // namespace

TEST(TerminalBalance, SourceFeedsOutgoingEdge) {
    EnergySystemModel m;
    m.nodes = {build::node("A"), build::node("B")};
    m.edges = {build::edge("cable", Carrier::Electricity, "A", "B")};
    m.devices = {build::source("gen", "A", Carrier::Electricity, 5.0, 5.0),
                 build::sink("load", "B", Carrier::Electricity, 20.0)};
    const auto w = solve_window(m);
    ASSERT_TRUE(w.solution.ok());
    EXPECT_NEAR(value_of(w.solution, w.problem.network.edges[0].flow_from(0)), 5.0, 1e-9);
    EXPECT_NEAR(value_of(w.solution, w.problem.devices[1].f(0)), 5.0, 1e-9);
}

TEST(TerminalBalance, SerialDeviceSplitsTerminals) {
    EnergySystemModel m;
    m.nodes = {pressure_node("C", Carrier::Gas, 5.0, std::nullopt)};
    DeviceSpec comp;
    comp.id = "comp";
    comp.node = "C";
    comp.flow_max = 10.0;
    CompressorParams p;
    p.nominal_flow = 5.0;
    p.nominal_inlet_pressure = 5.0;
    p.nominal_outlet_pressure = 10.0;
    comp.params = p;
    m.devices = {comp, build::source("gen", "C", Carrier::Electricity, 10.0)};
    MilpModel milp;
    const auto net = create_network_variables(milp, m, 0, 1, false);
    EXPECT_FALSE(net.nodes[0].q_term.contains(Carrier::Gas));
    EXPECT_TRUE(net.nodes[0].q_term.contains(Carrier::Electricity));
    EXPECT_TRUE(has_serial_device(m, m.nodes[0], Carrier::Gas));
}

TEST(TerminalBalance, IsolatedNodeEmitsNothing) {
    EnergySystemModel m;
    m.nodes = {build::node("lonely")};
    MilpModel milp;
    const auto net = create_network_variables(milp, m, 0, 1, false);
    EXPECT_TRUE(network_constraints(m, net, {}, 100.0, 0).empty());
    EXPECT_TRUE(terminal_balance_constraints(m, net, {}, 0, Carrier::Electricity, 0).empty());
    EXPECT_EQ(milp.variables().size(), 0u);
}

TEST(TerminalBalance, MergeBoundScalesWithCapacity) {
    EnergySystemModel m;
    m.nodes = {build::node("A")};
    m.devices = {build::source("gen", "A", Carrier::Electricity, 3.0),
                 build::sink("load", "A", Carrier::Electricity, 2.0)};
    EXPECT_DOUBLE_EQ(terminal_flow_bound(m, Carrier::Electricity), 50.0);
    EXPECT_DOUBLE_EQ(terminal_flow_bound(m, Carrier::Gas), 1.0);
}

TEST(Losses, LosslessEdgeKeepsFlow) {
    EnergySystemModel m;
    m.nodes = {build::node("A"), build::node("B")};
    m.edges = {build::edge("cable", Carrier::Electricity, "A", "B")};
    m.devices = {build::source("gen", "A", Carrier::Electricity, 7.0, 7.0),
                 build::sink("load", "B", Carrier::Electricity, 20.0)};
    const auto w = solve_window(m);
    ASSERT_TRUE(w.solution.ok());
    const auto& e = w.problem.network.edges[0];
    EXPECT_NEAR(value_of(w.solution, e.flow_from(0)), 7.0, 1e-9);
    EXPECT_NEAR(value_of(w.solution, e.flow_to(0)), 7.0, 1e-9);
}

TEST(Losses, TableInterpolation) {
    EnergySystemModel m;
    m.nodes = {build::node("A"), build::node("B")};
    auto cable = build::edge("cable", Carrier::Electricity, "A", "B");
    cable.losses = {{0.0, 0.0}, {10.0, 0.5}};
    m.edges = {cable};
    m.devices = {build::source("gen", "A", Carrier::Electricity, 10.0, 10.0),
                 build::sink("load", "B", Carrier::Electricity, 20.0)};
    const auto w = solve_window(m);
    ASSERT_TRUE(w.solution.ok());
    const auto& e = w.problem.network.edges[0];
    EXPECT_NEAR(value_of(w.solution, e.flow_to(0)), 9.5, 1e-9);
    EXPECT_NEAR(value_of(w.solution, w.problem.devices[1].f(0)), 9.5, 1e-9);
}

TEST(Losses, ZeroFlowHasZeroLoss) {
    EnergySystemModel m;
    m.nodes = {build::node("A"), build::node("B")};
    auto cable = build::edge("cable", Carrier::Electricity, "A", "B");
    cable.losses = {{0.0, 0.0}, {10.0, 0.5}};
    m.edges = {cable};
    m.devices = {build::source("gen", "A", Carrier::Electricity, 10.0),
                 build::sink("load", "B", Carrier::Electricity, 20.0)};
    auto problem =
        assemble(m, build::config(1, 1, 1), TimeSeriesSet{}, BoundaryState::initial(m), 0);
    problem.milp.fix(problem.network.edges[0].q[0], 0.0);
    const auto s = build::solve_exact(problem.milp);
    ASSERT_TRUE(s.ok());
    const auto& e = problem.network.edges[0];
    EXPECT_NEAR(value_of(s, e.plus_loss(0)), 0.0, 1e-12);
    EXPECT_NEAR(value_of(s, e.flow_to(0)), 0.0, 1e-12);
}

TEST(PressureBand, RelativeDeviation) {
    const auto r = pressure_range(gas_node_model(0.1));
    EXPECT_NEAR(r.first, 18.0, 1e-9);
    EXPECT_NEAR(r.second, 22.0, 1e-9);
}

TEST(PressureBand, ZeroDeviationFixesNominal) {
    const auto r = pressure_range(gas_node_model(0.0));
    EXPECT_NEAR(r.first, 20.0, 1e-9);
    EXPECT_NEAR(r.second, 20.0, 1e-9);
}

TEST(PressureBand, UnsetDeviationEmitsNothing) {
    const auto m = gas_node_model(std::nullopt);
    MilpModel milp;
    const auto net = create_network_variables(milp, m, 0, 1, false);
    EXPECT_TRUE(pressure_band_constraints(net.nodes[0], Carrier::Gas, 0, 0).empty());
}

TEST(EdgeLimits, OneDirectional) {
    auto e = build::edge("e", Carrier::Electricity, "A", "B");
    e.max_flow = 10.0;
    const auto r = edge_range(e);
    EXPECT_NEAR(r.first, 0.0, 1e-9);
    EXPECT_NEAR(r.second, 10.0, 1e-9);
}

TEST(EdgeLimits, Bidirectional) {
    auto e = build::edge("e", Carrier::Electricity, "A", "B");
    e.max_flow = 10.0;
    e.bidirectional = true;
    const auto r = edge_range(e);
    EXPECT_NEAR(r.first, -10.0, 1e-9);
    EXPECT_NEAR(r.second, 10.0, 1e-9);
}

TEST(EdgeLimits, UnboundedWhenAbsent) {
    auto e = build::edge("e", Carrier::Electricity, "A", "B");
    e.bidirectional = true;
    EnergySystemModel m;
    m.nodes = {build::node("A"), build::node("B")};
    m.edges = {e};
    MilpModel milp;
    const auto net = create_network_variables(milp, m, 0, 1, false);
    EXPECT_TRUE(edge_limit_constraints(net.edges[0], 0, 0).empty());
}

TEST(DcPowerFlow, TwoNodeAngles) {
    EnergySystemModel m;
    auto a = build::node("A");
    a.angle_reference = true;
    m.nodes = {a, build::node("B")};
    auto e = build::edge("line", Carrier::Electricity, "A", "B");
    e.model = FlowModel::DcPower;
    e.reactance = 0.1;
    e.bidirectional = true;
    m.edges = {e};
    MilpModel milp;
    const auto net = create_network_variables(milp, m, 0, 1, false);
    milp.add_constraints(dc_power_flow_constraints(m, net, 1.0, 0));
    milp.fix(net.nodes[1].angle[0], -0.01);
    const auto s = build::solve_exact(milp);
    ASSERT_TRUE(s.ok());
    EXPECT_NEAR(value_of(s, net.edges[0].flow(0)), -0.1, 1e-12);

    MilpModel flat;
    const auto net2 = create_network_variables(flat, m, 0, 1, false);
    flat.add_constraints(dc_power_flow_constraints(m, net2, 1.0, 0));
    flat.fix(net2.nodes[1].angle[0], 0.0);
    const auto s2 = build::solve_exact(flat);
    ASSERT_TRUE(s2.ok());
    EXPECT_NEAR(value_of(s2, net2.edges[0].flow(0)), 0.0, 1e-12);
}

TEST(DcPowerFlow, RingSplitsByImpedance) {
    EnergySystemModel m;
    auto n1 = build::node("N1");
    n1.angle_reference = true;
    m.nodes = {n1, build::node("N2"), build::node("N3")};
    auto line = [](std::string id, std::string from, std::string to) {
        auto e = build::edge(std::move(id), Carrier::Electricity, std::move(from), std::move(to));
        e.model = FlowModel::DcPower;
        e.reactance = 0.05;
        e.bidirectional = true;
        return e;
    };
    m.edges = {line("l12", "N1", "N2"), line("l13", "N1", "N3"), line("l32", "N3", "N2")};
    m.devices = {build::source("gen", "N1", Carrier::Electricity, 1.0, 1.0),
                 build::sink("load", "N2", Carrier::Electricity, 1.0, 1.0)};
    const auto w = solve_window(m);
    ASSERT_TRUE(w.solution.ok());
    EXPECT_NEAR(edge_flow(w, 0), 2.0 / 3.0, 1e-9);
    EXPECT_NEAR(edge_flow(w, 1), 1.0 / 3.0, 1e-9);
    EXPECT_NEAR(edge_flow(w, 2), 1.0 / 3.0, 1e-9);
}

TEST(DcPowerFlow, MissingReferenceIsConfigError) {
    EnergySystemModel m;
    m.nodes = {build::node("A"), build::node("B")};
    auto e = build::edge("line", Carrier::Electricity, "A", "B");
    e.model = FlowModel::DcPower;
    e.reactance = 0.1;
    m.edges = {e};
    MilpModel milp;
    const auto net = create_network_variables(milp, m, 0, 1, false);
    EXPECT_THROW(dc_power_flow_constraints(m, net, 1.0, 0), ConfigError);
}

namespace {

EnergySystemModel pipeline(FlowModel model, Carrier c, double p1, double p2) {
    EnergySystemModel m;
    m.nodes = {pressure_node("from", c, p1, 0.0), pressure_node("to", c, p2, 0.0)};
    m.nodes[1].elevation = 0.0;
    auto pipe = build::edge("pipe", c, "from", "to");
    pipe.model = model;
    pipe.diameter_mm = 600.0;
    pipe.length_km = 30.0;
    pipe.base_temperature = 288.0;
    pipe.base_pressure = 0.101;
    m.edges = {pipe};
    m.devices = {build::source("src", "from", c, 1e6), build::sink("snk", "to", c, 1e6)};
    CarrierProperties gas;
    gas.gravity = 0.6;
    gas.temperature = 300.0;
    gas.compressibility = 0.9;
    m.carriers[Carrier::Gas] = gas;
    CarrierProperties water;
    water.density = 1000.0;
    water.darcy_friction = 0.02;
    m.carriers[Carrier::Water] = water;
    return m;
}

}  // namespace

TEST(Weymouth, FlowAtNominalPressures) {
    const auto m = pipeline(FlowModel::Weymouth, Carrier::Gas, 10.0, 9.0);
    const auto w = solve_window(m);
    ASSERT_TRUE(w.solution.ok());
    const auto pipe = physics::weymouth_pipe(600.0, 30.0, 0.0, 0.0, 288.0, 0.101, 0.6, 300.0, 0.9);
    const double expected = physics::weymouth_flow(10.0, 9.0, pipe);
    EXPECT_NEAR(edge_flow(w, 0), expected, 1e-9 * expected);
}

TEST(Weymouth, EqualNominalPressuresRejected) {
    const auto m = pipeline(FlowModel::Weymouth, Carrier::Gas, 10.0, 10.0);
    EXPECT_THROW(solve_window(m), InfeasibleNominalError);
}

TEST(Weymouth, MissingParametersIsConfigError) {
    auto m = pipeline(FlowModel::Weymouth, Carrier::Gas, 10.0, 9.0);
    m.edges[0].diameter_mm.reset();
    EXPECT_THROW(solve_window(m), ConfigError);
}

TEST(Darcy, FlowAtNominalPressures) {
    const auto m = pipeline(FlowModel::Darcy, Carrier::Water, 6.0, 4.0);
    const auto w = solve_window(m);
    ASSERT_TRUE(w.solution.ok());
    const auto pipe = physics::darcy_pipe(600.0, 30.0, 0.02, 1000.0, 0.0, 0.0);
    const double expected = physics::darcy_flow(6.0, 4.0, pipe);
    EXPECT_NEAR(edge_flow(w, 0), expected, 1e-9 * expected);
}

TEST(Darcy, PressureDifferenceTracksFlow) {
    auto m = pipeline(FlowModel::Darcy, Carrier::Water, 6.0, 4.0);
    m.nodes[0].pressures[Carrier::Water].max_deviation = 0.5;
    m.nodes[1].pressures[Carrier::Water].max_deviation = 0.5;
    m.devices[0].flow_min = 0.0;
    const auto pipe = physics::darcy_pipe(600.0, 30.0, 0.02, 1000.0, 0.0, 0.0);
    const auto lin = physics::linearize_darcy(pipe, 6.0, 4.0);
    auto problem = assemble(m, build::config(1, 1, 1), TimeSeriesSet{}, BoundaryState::initial(m), 0);
    const auto& net = problem.network;
    problem.milp.fix(net.edges[0].q[0], lin.nominal_flow);
    const auto s = build::solve_exact(problem.milp);
    ASSERT_TRUE(s.ok());
    const double p1 = value_of(s, net.nodes[0].p_out.at(Carrier::Water)[0]);
    const double p2 = value_of(s, net.nodes[1].p_in.at(Carrier::Water)[0]);
    EXPECT_NEAR(p2 - p1, -2.0, 1e-9);
}
