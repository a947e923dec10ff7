#include "platopt/network.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "platopt/errors.hpp"
#include "platopt/physics.hpp"

namespace platopt {

namespace {

std::string node_row(const Node& n, std::string_view what, int t) {
    return fmt::format("node.{}.{}.t{}", n.id, what, t);
}

std::string edge_row(const Edge& e, std::string_view what, int t) {
    return fmt::format("edge.{}.{}.t{}", e.id, what, t);
}

bool touches(const DeviceSpec& d, Carrier c) {
    const auto in = device_inputs(d);
    const auto out = device_outputs(d);
    return std::find(in.begin(), in.end(), c) != in.end() ||
           std::find(out.begin(), out.end(), c) != out.end();
}

}  // namespace

LinearExpr EdgeVariables::plus_loss(int k) const {
    if (!lossy()) return 0.0;
    return loss_plus[static_cast<std::size_t>(k)];
}

LinearExpr EdgeVariables::minus_loss(int k) const {
    if (!lossy()) return 0.0;
    return loss_minus[static_cast<std::size_t>(k)];
}

double terminal_flow_bound(const EnergySystemModel& model, Carrier carrier) {
    double total = 0.0;
    for (const auto& d : model.devices) {
        if (touches(d, carrier)) total += d.flow_max;
    }
    for (const auto& e : model.edges) {
        if (e.carrier == carrier && e.max_flow) total += *e.max_flow;
    }
    return std::max(1.0, 10.0 * total);
}

std::vector<Carrier> node_carriers(const EnergySystemModel& model, const Node& node) {
    std::set<Carrier> found;
    for (const auto& d : model.devices) {
        if (d.node != node.id) continue;
        for (Carrier c : device_inputs(d)) found.insert(c);
        for (Carrier c : device_outputs(d)) found.insert(c);
    }
    for (const auto& e : model.edges) {
        if (e.from == node.id || e.to == node.id) found.insert(e.carrier);
    }
    return {found.begin(), found.end()};
}

bool has_serial_device(const EnergySystemModel& model, const Node& node, Carrier carrier) {
    for (const auto& d : model.devices) {
        if (d.node != node.id) continue;
        const auto serial = device_serial_carriers(d);
        if (std::find(serial.begin(), serial.end(), carrier) != serial.end()) return true;
    }
    return false;
}

NetworkVariables create_network_variables(MilpModel& milp, const EnergySystemModel& model,
                                          int t0, int horizon, bool elastic) {
    NetworkVariables net;
    net.t0 = t0;
    net.horizon = horizon;

    std::set<std::string> dc_nodes;
    for (const auto& e : model.edges) {
        if (e.model == FlowModel::DcPower) {
            dc_nodes.insert(e.from);
            dc_nodes.insert(e.to);
        }
    }

    for (const auto& node : model.nodes) {
        NodeVariables nv;
        nv.node = &node;
        nv.carriers = node_carriers(model, node);
        for (Carrier c : nv.carriers) {
            const auto cname = to_string(c);
            if (!has_serial_device(model, node, c)) {
                const double bound = terminal_flow_bound(model, c);
                auto& list = nv.q_term[c];
                for (int k = 0; k < horizon; ++k) {
                    list.push_back(milp.add_continuous(
                        fmt::format("node.{}.qterm.{}.t{}", node.id, cname, t0 + k), -bound,
                        bound));
                }
            }
            if (node.pressures.contains(c)) {
                auto& pin = nv.p_in[c];
                auto& pout = nv.p_out[c];
                for (int k = 0; k < horizon; ++k) {
                    pin.push_back(milp.add_continuous(
                        fmt::format("node.{}.pressure.{}.in.t{}", node.id, cname, t0 + k)));
                    pout.push_back(milp.add_continuous(
                        fmt::format("node.{}.pressure.{}.out.t{}", node.id, cname, t0 + k)));
                }
            }
        }
        if (dc_nodes.contains(node.id)) {
            for (int k = 0; k < horizon; ++k) {
                nv.angle.push_back(milp.add_continuous(
                    fmt::format("node.{}.angle.t{}", node.id, t0 + k), -kInf, kInf));
            }
        }
        const bool electric =
            std::find(nv.carriers.begin(), nv.carriers.end(), Carrier::Electricity) !=
            nv.carriers.end();
        if (elastic && electric) {
            for (int k = 0; k < horizon; ++k) {
                nv.slack.push_back(
                    milp.add_continuous(fmt::format("node.{}.slack.t{}", node.id, t0 + k)));
            }
        }
        net.nodes.push_back(std::move(nv));
    }

    for (const auto& edge : model.edges) {
        EdgeVariables ev;
        ev.edge = &edge;
        for (int k = 0; k < horizon; ++k) {
            const int t = t0 + k;
            ev.q.push_back(milp.add_continuous(fmt::format("edge.{}.flow.t{}", edge.id, t), -kInf,
                                               kInf));
            if (edge.losses.empty()) continue;
            const double cap = edge.max_flow.value_or(edge.losses.back().flow);
            ev.q_plus.push_back(
                milp.add_continuous(fmt::format("edge.{}.qplus.t{}", edge.id, t), 0.0, cap));
            ev.q_minus.push_back(milp.add_continuous(fmt::format("edge.{}.qminus.t{}", edge.id, t),
                                                     0.0, edge.bidirectional ? cap : 0.0));
            ev.loss_plus.push_back(
                milp.add_continuous(fmt::format("edge.{}.lossplus.t{}", edge.id, t)));
            ev.loss_minus.push_back(
                milp.add_continuous(fmt::format("edge.{}.lossminus.t{}", edge.id, t)));
            std::vector<VarId> lp;
            std::vector<VarId> lm;
            for (std::size_t i = 0; i < edge.losses.size(); ++i) {
                lp.push_back(milp.add_continuous(
                    fmt::format("edge.{}.lambdaplus{}.t{}", edge.id, i, t), 0.0, 1.0));
                lm.push_back(milp.add_continuous(
                    fmt::format("edge.{}.lambdaminus{}.t{}", edge.id, i, t), 0.0, 1.0));
            }
            ev.lambda_plus.push_back(std::move(lp));
            ev.lambda_minus.push_back(std::move(lm));
        }
        net.edges.push_back(std::move(ev));
    }
    return net;
}

ConstraintSet terminal_balance_constraints(const EnergySystemModel& model,
                                           const NetworkVariables& net,
                                           const std::vector<DeviceVariables>& devices,
                                           std::size_t node_index, Carrier carrier, int k) {
    const NodeVariables& nv = net.nodes.at(node_index);
    const Node& node = *nv.node;
    const auto present = std::find(nv.carriers.begin(), nv.carriers.end(), carrier);
    if (present == nv.carriers.end()) return {};

    LinearExpr in_terminal;
    LinearExpr out_terminal;
    for (const auto& dv : devices) {
        if (dv.spec->node != node.id) continue;
        in_terminal -= dv.in_flow(carrier, k);
        out_terminal -= dv.out_flow(carrier, k);
    }
    for (std::size_t e = 0; e < model.edges.size(); ++e) {
        const Edge& edge = model.edges[e];
        if (edge.carrier != carrier) continue;
        if (edge.to == node.id) in_terminal += net.edges[e].flow_to(k);
        if (edge.from == node.id) out_terminal += net.edges[e].flow_from(k);
    }
    if (auto it = nv.q_term.find(carrier); it != nv.q_term.end()) {
        const VarId q = it->second.at(static_cast<std::size_t>(k));
        in_terminal -= q;
        out_terminal -= q;
    } else if (in_terminal.is_constant() && out_terminal.is_constant()) {
        throw AssemblyError("node " + node.id + " has no terminal context for " +
                            std::string(to_string(carrier)));
    }
    if (carrier == Carrier::Electricity && !nv.slack.empty()) {
        in_terminal += nv.slack[static_cast<std::size_t>(k)];
    }
    const int t = net.t0 + k;
    const auto cname = to_string(carrier);
    ConstraintSet out;
    if (!in_terminal.is_constant()) {
        out.push_back(equal(node_row(node, fmt::format("balance_in.{}", cname), t), in_terminal,
                            0.0));
    }
    if (!out_terminal.is_constant()) {
        out.push_back(equal(node_row(node, fmt::format("balance_out.{}", cname), t),
                            out_terminal, 0.0));
    }
    return out;
}

ConstraintSet loss_constraints(const EdgeVariables& ev, int t0, int k) {
    if (!ev.lossy()) return {};
    const Edge& e = *ev.edge;
    const int t = t0 + k;
    const auto uk = static_cast<std::size_t>(k);
    ConstraintSet out;
    out.push_back(equal(edge_row(e, "split", t), ev.q[uk],
                        LinearExpr(ev.q_plus[uk]) - LinearExpr(ev.q_minus[uk])));
    auto curve = [&](const std::vector<VarId>& lambda, VarId flow, VarId loss,
                     std::string_view side) {
        LinearExpr x;
        LinearExpr l;
        LinearExpr sum;
        for (std::size_t i = 0; i < e.losses.size(); ++i) {
            x.add(lambda[i], e.losses[i].flow);
            l.add(lambda[i], e.losses[i].loss);
            sum.add(lambda[i], 1.0);
        }
        out.push_back(equal(edge_row(e, fmt::format("{}_flow", side), t), flow, x));
        out.push_back(equal(edge_row(e, fmt::format("{}_loss", side), t), loss, l));
        out.push_back(equal(edge_row(e, fmt::format("{}_convex", side), t), sum, 1.0));
    };
    curve(ev.lambda_plus[uk], ev.q_plus[uk], ev.loss_plus[uk], "plus");
    curve(ev.lambda_minus[uk], ev.q_minus[uk], ev.loss_minus[uk], "minus");
    return out;
}

ConstraintSet edge_limit_constraints(const EdgeVariables& ev, int t0, int k) {
    const Edge& e = *ev.edge;
    const int t = t0 + k;
    ConstraintSet out;
    const LinearExpr q = ev.flow(k);
    if (e.max_flow) out.push_back(less_equal(edge_row(e, "max_flow", t), q, *e.max_flow));
    if (!e.bidirectional) {
        out.push_back(greater_equal(edge_row(e, "direction", t), q, 0.0));
    } else if (e.max_flow) {
        out.push_back(greater_equal(edge_row(e, "min_flow", t), q, -*e.max_flow));
    }
    return out;
}

ConstraintSet pressure_band_constraints(const NodeVariables& nv, Carrier carrier, int t0,
                                        int k) {
    const Node& n = *nv.node;
    auto it = n.pressures.find(carrier);
    if (it == n.pressures.end() || !it->second.max_deviation) return {};
    auto pin = nv.p_in.find(carrier);
    if (pin == nv.p_in.end()) return {};
    const double delta = *it->second.max_deviation;
    const auto uk = static_cast<std::size_t>(k);
    const int t = t0 + k;
    const auto cname = to_string(carrier);
    ConstraintSet out;
    for (Terminal term : {Terminal::In, Terminal::Out}) {
        const double nominal = it->second.nominal_at(term);
        const VarId p = term == Terminal::In ? pin->second[uk] : nv.p_out.at(carrier)[uk];
        const char* side = term == Terminal::In ? "in" : "out";
        out.push_back(greater_equal(node_row(n, fmt::format("pressure_lo.{}.{}", cname, side), t),
                                    p, nominal * (1.0 - delta)));
        out.push_back(less_equal(node_row(n, fmt::format("pressure_hi.{}.{}", cname, side), t), p,
                                 nominal * (1.0 + delta)));
    }
    return out;
}

ConstraintSet pressure_merge_constraints(const NodeVariables& nv, Carrier carrier, int t0,
                                         int k) {
    if (!nv.q_term.contains(carrier) || !nv.p_in.contains(carrier)) return {};
    const auto uk = static_cast<std::size_t>(k);
    ConstraintSet out;
    out.push_back(equal(node_row(*nv.node, fmt::format("pressure_merge.{}", to_string(carrier)),
                                 t0 + k),
                        nv.p_in.at(carrier)[uk], nv.p_out.at(carrier)[uk]));
    return out;
}

ConstraintSet dc_power_flow_constraints(const EnergySystemModel& model,
                                        const NetworkVariables& net, double s_base, int k) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < model.nodes.size(); ++i) index[model.nodes[i].id] = i;

    // components of the dc-power graph must each contain a reference node
    std::vector<std::size_t> parent(model.nodes.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> root = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = root(parent[x]);
    };
    const auto uk = static_cast<std::size_t>(k);
    const int t = net.t0 + k;
    ConstraintSet out;
    for (std::size_t e = 0; e < model.edges.size(); ++e) {
        const Edge& edge = model.edges[e];
        if (edge.model != FlowModel::DcPower) continue;
        if (!edge.reactance || *edge.reactance <= 0.0) {
            throw ConfigError("edge " + edge.id + ": dc-power edge needs reactance > 0");
        }
        const std::size_t a = index.at(edge.from);
        const std::size_t b = index.at(edge.to);
        parent[root(a)] = root(b);
        const double coef = -s_base / *edge.reactance;
        out.push_back(equal(edge_row(edge, "dcflow", t), net.edges[e].flow(k),
                            coef * (LinearExpr(net.nodes[a].angle[uk]) -
                                    LinearExpr(net.nodes[b].angle[uk]))));
    }
    std::map<std::size_t, bool> referenced;
    for (std::size_t i = 0; i < model.nodes.size(); ++i) {
        if (net.nodes[i].angle.empty()) continue;
        const bool ref = model.nodes[i].angle_reference;
        referenced[root(i)] = referenced[root(i)] || ref;
        if (ref) {
            out.push_back(equal(node_row(model.nodes[i], "angle_ref", t), net.nodes[i].angle[uk],
                                0.0));
        }
    }
    for (const auto& [component, ok] : referenced) {
        if (!ok) {
            throw ConfigError("dc-power subnetwork containing node " +
                              model.nodes[component].id + " has no reference node");
        }
    }
    return out;
}

namespace {

struct PipeEnds {
    const Node* from;
    const Node* to;
    VarId p1;
    VarId p2;
    double p1_nominal;
    double p2_nominal;
};

PipeEnds pipe_ends(const EnergySystemModel& model, const NetworkVariables& net,
                   const Edge& edge, int k) {
    PipeEnds ends{};
    const auto uk = static_cast<std::size_t>(k);
    for (std::size_t i = 0; i < model.nodes.size(); ++i) {
        const auto& n = model.nodes[i];
        if (n.id == edge.from) {
            ends.from = &n;
            auto it = net.nodes[i].p_out.find(edge.carrier);
            if (it == net.nodes[i].p_out.end()) break;
            ends.p1 = it->second[uk];
            ends.p1_nominal = n.pressures.at(edge.carrier).nominal_at(Terminal::Out);
        }
        if (n.id == edge.to) {
            ends.to = &n;
            auto it = net.nodes[i].p_in.find(edge.carrier);
            if (it == net.nodes[i].p_in.end()) break;
            ends.p2 = it->second[uk];
            ends.p2_nominal = n.pressures.at(edge.carrier).nominal_at(Terminal::In);
        }
    }
    if (!ends.p1.valid() || !ends.p2.valid()) {
        throw ConfigError("edge " + edge.id + ": end nodes need nominal pressures");
    }
    return ends;
}

}  // namespace

ConstraintSet weymouth_linearized_constraints(const EnergySystemModel& model,
                                              const NetworkVariables& net,
                                              std::size_t edge_index, int k) {
    const Edge& edge = model.edges.at(edge_index);
    const auto& gas = model.carrier(Carrier::Gas);
    if (!edge.diameter_mm || !edge.length_km || !edge.base_temperature || !edge.base_pressure ||
        !gas.gravity || !gas.temperature || !gas.compressibility) {
        throw ConfigError("edge " + edge.id + ": incomplete Weymouth parameters");
    }
    const PipeEnds ends = pipe_ends(model, net, edge, k);
    const auto pipe = physics::weymouth_pipe(*edge.diameter_mm, *edge.length_km,
                                             ends.from->elevation, ends.to->elevation,
                                             *edge.base_temperature, *edge.base_pressure,
                                             *gas.gravity, *gas.temperature, *gas.compressibility);
    const auto lin = physics::linearize_weymouth(pipe, ends.p1_nominal, ends.p2_nominal);
    ConstraintSet out;
    out.push_back(equal(edge_row(edge, "weymouth", net.t0 + k), net.edges[edge_index].flow(k),
                        lin.coef_p1 * LinearExpr(ends.p1) + lin.coef_p2 * LinearExpr(ends.p2)));
    return out;
}

ConstraintSet darcy_linearized_constraints(const EnergySystemModel& model,
                                           const NetworkVariables& net,
                                           std::size_t edge_index, int k) {
    const Edge& edge = model.edges.at(edge_index);
    const auto& liquid = model.carrier(edge.carrier);
    if (!edge.diameter_mm || !edge.length_km || !liquid.density || !liquid.darcy_friction) {
        throw ConfigError("edge " + edge.id + ": incomplete Darcy-Weisbach parameters");
    }
    const PipeEnds ends = pipe_ends(model, net, edge, k);
    const auto pipe = physics::darcy_pipe(*edge.diameter_mm, *edge.length_km,
                                          *liquid.darcy_friction, *liquid.density,
                                          ends.from->elevation, ends.to->elevation);
    const auto lin = physics::linearize_darcy(pipe, ends.p1_nominal, ends.p2_nominal);
    // p2 - p1 = -(q - q_hat) 2X/k + (p2_hat - p1_hat)
    ConstraintSet out;
    out.push_back(equal(edge_row(edge, "darcy", net.t0 + k),
                        LinearExpr(ends.p2) - LinearExpr(ends.p1),
                        -lin.slope * (net.edges[edge_index].flow(k) - lin.nominal_flow) +
                            lin.nominal_difference));
    return out;
}

ConstraintSet network_constraints(const EnergySystemModel& model, const NetworkVariables& net,
                                  const std::vector<DeviceVariables>& devices, double s_base,
                                  int k) {
    ConstraintSet out;
    auto append = [&out](ConstraintSet more) {
        for (auto& c : more) out.push_back(std::move(c));
    };
    for (std::size_t n = 0; n < model.nodes.size(); ++n) {
        for (Carrier c : net.nodes[n].carriers) {
            append(terminal_balance_constraints(model, net, devices, n, c, k));
            append(pressure_band_constraints(net.nodes[n], c, net.t0, k));
            append(pressure_merge_constraints(net.nodes[n], c, net.t0, k));
        }
    }
    bool any_dc = false;
    for (std::size_t e = 0; e < model.edges.size(); ++e) {
        append(loss_constraints(net.edges[e], net.t0, k));
        append(edge_limit_constraints(net.edges[e], net.t0, k));
        switch (model.edges[e].model) {
            case FlowModel::Transport: break;
            case FlowModel::DcPower: any_dc = true; break;
            case FlowModel::Weymouth:
                append(weymouth_linearized_constraints(model, net, e, k));
                break;
            case FlowModel::Darcy: append(darcy_linearized_constraints(model, net, e, k)); break;
        }
    }
    if (any_dc) append(dc_power_flow_constraints(model, net, s_base, k));
    return out;
}

}  // namespace platopt
