#pragma once

// Edge and node variables of a planning window and the network constraint
// generators: terminal balances, losses, pressure bands, flow limits and the
// DC power flow, Weymouth and Darcy-Weisbach edge models.

#include <map>
#include <vector>

#include "platopt/devices.hpp"
#include "platopt/lp.hpp"
#include "platopt/model.hpp"

namespace platopt {

struct EdgeVariables {
    const Edge* edge = nullptr;
    std::vector<VarId> q;  // signed flow
    // present only for edges with a loss table
    std::vector<VarId> q_plus, q_minus, loss_plus, loss_minus;
    std::vector<std::vector<VarId>> lambda_plus, lambda_minus;

    bool lossy() const { return !q_plus.empty(); }
    LinearExpr flow(int k) const { return q[static_cast<std::size_t>(k)]; }
    LinearExpr plus_loss(int k) const;
    LinearExpr minus_loss(int k) const;
    /// Flow leaving the from-node: q + q_minus_loss.
    LinearExpr flow_from(int k) const { return flow(k) + minus_loss(k); }
    /// Flow arriving at the to-node: q - q_plus_loss.
    LinearExpr flow_to(int k) const { return flow(k) - plus_loss(k); }
};

struct NodeVariables {
    const Node* node = nullptr;
    std::vector<Carrier> carriers;                    // carriers present at the node
    std::map<Carrier, std::vector<VarId>> q_term;     // only for merged terminals
    std::map<Carrier, std::vector<VarId>> p_in;       // declared pressures only
    std::map<Carrier, std::vector<VarId>> p_out;
    std::vector<VarId> angle;                         // dc-power nodes only
    std::vector<VarId> slack;                         // elastic electricity supply
};

struct NetworkVariables {
    std::vector<NodeVariables> nodes;  // aligned with model.nodes
    std::vector<EdgeVariables> edges;  // aligned with model.edges
    int t0 = 0;
    int horizon = 0;
};

/// Bound used for terminal-merge flows of a carrier: 10x the installed
/// device and edge capacity handling it (at least 1).
double terminal_flow_bound(const EnergySystemModel& model, Carrier carrier);

/// Carriers of a node's terminals, from attached devices and edges.
std::vector<Carrier> node_carriers(const EnergySystemModel& model, const Node& node);

/// Whether a device at the node bridges its in- and out-terminal for the
/// carrier (then no terminal-merge flow is created).
bool has_serial_device(const EnergySystemModel& model, const Node& node, Carrier carrier);

NetworkVariables create_network_variables(MilpModel& milp, const EnergySystemModel& model,
                                          int t0, int horizon, bool elastic);

/// In- and out-terminal balance of one node and carrier at step k.
ConstraintSet terminal_balance_constraints(const EnergySystemModel& model,
                                           const NetworkVariables& net,
                                           const std::vector<DeviceVariables>& devices,
                                           std::size_t node_index, Carrier carrier, int k);

ConstraintSet loss_constraints(const EdgeVariables& edge, int t0, int k);
ConstraintSet edge_limit_constraints(const EdgeVariables& edge, int t0, int k);
ConstraintSet pressure_band_constraints(const NodeVariables& node, Carrier carrier, int t0,
                                        int k);
/// Ties the in- and out-terminal pressures together where terminals merge.
ConstraintSet pressure_merge_constraints(const NodeVariables& node, Carrier carrier, int t0,
                                         int k);

/// q = S_base * (-1/x) (theta_from - theta_to) for every dc-power edge, plus
/// theta = 0 at reference nodes.
ConstraintSet dc_power_flow_constraints(const EnergySystemModel& model,
                                        const NetworkVariables& net, double s_base, int k);

ConstraintSet weymouth_linearized_constraints(const EnergySystemModel& model,
                                              const NetworkVariables& net,
                                              std::size_t edge_index, int k);
ConstraintSet darcy_linearized_constraints(const EnergySystemModel& model,
                                           const NetworkVariables& net,
                                           std::size_t edge_index, int k);

/// Every network constraint for step k.
ConstraintSet network_constraints(const EnergySystemModel& model, const NetworkVariables& net,
                                  const std::vector<DeviceVariables>& devices, double s_base,
                                  int k);

}  // namespace platopt
