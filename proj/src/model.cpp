#include "platopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <regex>
#include <set>

#include "platopt/errors.hpp"
#include "platopt/physics.hpp"

namespace platopt {

namespace {

constexpr std::pair<Carrier, std::string_view> kCarrierNames[] = {
    {Carrier::Electricity, "el"},  {Carrier::Heat, "heat"},
    {Carrier::Oil, "oil"},         {Carrier::Gas, "gas"},
    {Carrier::Water, "water"},     {Carrier::Hydrogen, "hydrogen"},
    {Carrier::Wellstream, "wellstream"}};

constexpr std::pair<FlowModel, std::string_view> kFlowModelNames[] = {
    {FlowModel::Transport, "transport"},
    {FlowModel::DcPower, "dc-power"},
    {FlowModel::Weymouth, "weymouth"},
    {FlowModel::Darcy, "darcy"}};

constexpr std::pair<DeviceType, std::string_view> kDeviceTypeNames[] = {
    {DeviceType::Well, "well"},
    {DeviceType::Separator, "separator"},
    {DeviceType::Compressor, "compressor"},
    {DeviceType::Pump, "pump"},
    {DeviceType::GasTurbine, "gas_turbine"},
    {DeviceType::Heater, "heater"},
    {DeviceType::Source, "source"},
    {DeviceType::Sink, "sink"},
    {DeviceType::Battery, "battery"},
    {DeviceType::HydrogenStorage, "hydrogen_storage"},
    {DeviceType::Electrolyser, "electrolyser"},
    {DeviceType::FuelCell, "fuel_cell"}};

template <typename Enum, std::size_t N>
std::string_view name_of(const std::pair<Enum, std::string_view> (&table)[N], Enum v) {
    for (const auto& [e, name] : table) {
        if (e == v) return name;
    }
    return "?";
}

template <typename Enum, std::size_t N>
std::optional<Enum> parse_enum(const std::pair<Enum, std::string_view> (&table)[N],
                               std::string_view s) {
    for (const auto& [e, name] : table) {
        if (name == s) return e;
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(Carrier carrier) { return name_of(kCarrierNames, carrier); }
std::optional<Carrier> carrier_from_string(std::string_view name) {
    if (name == "electricity") return Carrier::Electricity;
    return parse_enum(kCarrierNames, name);
}
std::string_view to_string(FlowModel model) { return name_of(kFlowModelNames, model); }
std::optional<FlowModel> flow_model_from_string(std::string_view name) {
    return parse_enum(kFlowModelNames, name);
}
std::string_view to_string(DeviceType type) { return name_of(kDeviceTypeNames, type); }
std::optional<DeviceType> device_type_from_string(std::string_view name) {
    return parse_enum(kDeviceTypeNames, name);
}

bool PenaltyCurve::is_convex() const {
    for (std::size_t i = 2; i < breakpoints.size(); ++i) {
        const auto& a = breakpoints[i - 2];
        const auto& b = breakpoints[i - 1];
        const auto& c = breakpoints[i];
        const double s1 = (b.penalty - a.penalty) / (b.flow - a.flow);
        const double s2 = (c.penalty - b.penalty) / (c.flow - b.flow);
        if (s2 < s1 - 1e-12 * std::max(1.0, std::abs(s1))) return false;
    }
    return true;
}

std::vector<Carrier> device_inputs(const DeviceSpec& d) {
    using C = Carrier;
    switch (d.type()) {
        case DeviceType::Well: return {C::Gas};
        case DeviceType::Separator: return {C::Oil, C::Gas, C::Water, C::Heat, C::Electricity};
        case DeviceType::Compressor:
            if (d.as<CompressorParams>().drive == CompressorDrive::Electric) {
                return {C::Gas, C::Electricity};
            }
            return {C::Gas};
        case DeviceType::Pump: return {d.as<PumpParams>().carrier, C::Electricity};
        case DeviceType::GasTurbine: return {C::Gas};
        case DeviceType::Heater: return {C::Electricity};
        case DeviceType::Source: return {};
        case DeviceType::Sink: return {d.as<SinkParams>().carrier};
        case DeviceType::Battery: return {C::Electricity};
        case DeviceType::HydrogenStorage: return {C::Hydrogen};
        case DeviceType::Electrolyser: return {C::Electricity};
        case DeviceType::FuelCell: return {C::Hydrogen};
    }
    return {};
}

std::vector<Carrier> device_outputs(const DeviceSpec& d) {
    using C = Carrier;
    switch (d.type()) {
        case DeviceType::Well: return {C::Oil, C::Gas, C::Water};
        case DeviceType::Separator: return {C::Oil, C::Gas, C::Water};
        case DeviceType::Compressor: return {C::Gas};
        case DeviceType::Pump: return {d.as<PumpParams>().carrier};
        case DeviceType::GasTurbine: return {C::Electricity, C::Heat};
        case DeviceType::Heater: return {C::Heat};
        case DeviceType::Source: return {d.as<SourceParams>().carrier};
        case DeviceType::Sink: return {};
        case DeviceType::Battery: return {C::Electricity};
        case DeviceType::HydrogenStorage: return {C::Hydrogen};
        case DeviceType::Electrolyser: return {C::Hydrogen, C::Heat};
        case DeviceType::FuelCell: return {C::Electricity, C::Heat};
    }
    return {};
}

std::vector<Carrier> device_serial_carriers(const DeviceSpec& d) {
    switch (d.type()) {
        case DeviceType::Well: return {Carrier::Gas};
        case DeviceType::Separator: return {Carrier::Oil, Carrier::Gas, Carrier::Water};
        case DeviceType::Compressor: return {Carrier::Gas};
        case DeviceType::Pump: return {d.as<PumpParams>().carrier};
        default: return {};
    }
}

bool is_storage(DeviceType type) {
    return type == DeviceType::Battery || type == DeviceType::HydrogenStorage;
}

bool is_gas_combusting(const DeviceSpec& d) {
    if (d.type() == DeviceType::GasTurbine) return true;
    if (const auto* c = d.maybe<CompressorParams>()) return c->drive == CompressorDrive::Gas;
    return false;
}

const Profile* TimeSeriesSet::find(std::string_view id) const {
    for (const auto& p : profiles) {
        if (p.id == id) return &p;
    }
    return nullptr;
}

std::size_t TimeSeriesSet::length() const {
    if (profiles.empty()) return 0;
    std::size_t n = profiles.front().forecast.size();
    for (const auto& p : profiles) n = std::min(n, p.forecast.size());
    return n;
}

const Node* EnergySystemModel::find_node(std::string_view id) const {
    for (const auto& n : nodes) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

const Edge* EnergySystemModel::find_edge(std::string_view id) const {
    for (const auto& e : edges) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

const DeviceSpec* EnergySystemModel::find_device(std::string_view id) const {
    for (const auto& d : devices) {
        if (d.id == id) return &d;
    }
    return nullptr;
}

const CarrierProperties& EnergySystemModel::carrier(Carrier c) const {
    static const CarrierProperties empty;
    auto it = carriers.find(c);
    return it == carriers.end() ? empty : it->second;
}

std::optional<std::pair<double, double>> nominal_pressures(const EnergySystemModel& model,
                                                           const DeviceSpec& device) {
    std::optional<double> p_in;
    std::optional<double> p_out;
    Carrier carrier = Carrier::Gas;
    if (const auto* c = device.maybe<CompressorParams>()) {
        p_in = c->nominal_inlet_pressure;
        p_out = c->nominal_outlet_pressure;
    } else if (const auto* p = device.maybe<PumpParams>()) {
        p_in = p->nominal_inlet_pressure;
        p_out = p->nominal_outlet_pressure;
        carrier = p->carrier;
    } else {
        return std::nullopt;
    }
    if (const Node* node = model.find_node(device.node)) {
        auto it = node->pressures.find(carrier);
        if (it != node->pressures.end()) {
            if (!p_in) p_in = it->second.nominal_at(Terminal::In);
            if (!p_out) p_out = it->second.nominal_at(Terminal::Out);
        }
    }
    if (!p_in || !p_out) return std::nullopt;
    return std::make_pair(*p_in, *p_out);
}

// ------------------------------------------------------------------ validation

namespace {

class Diagnostics {
public:
    void add(const std::string& element, std::string message) {
        list_.push_back({element, std::move(message)});
    }
    void require(bool ok, const std::string& element, std::string message) {
        if (!ok) add(element, std::move(message));
    }
    std::vector<Diagnostic> take() { return std::move(list_); }

private:
    std::vector<Diagnostic> list_;
};

bool valid_id(const std::string& id) {
    static const std::regex pattern("[A-Za-z][A-Za-z0-9_]*");
    return std::regex_match(id, pattern);
}

bool in_unit_interval_open_closed(double v) { return v > 0.0 && v <= 1.0; }

void check_carriers(const EnergySystemModel& m, Diagnostics& diag) {
    for (const auto& [carrier, props] : m.carriers) {
        const std::string name = "carrier " + std::string(to_string(carrier));
        if (props.calorific_value) {
            diag.require(*props.calorific_value > 0.0, name, "calorific value must be > 0");
        }
        if (props.co2_content) {
            diag.require(*props.co2_content >= 0.0, name, "CO2 content must be >= 0");
        }
        if (props.density) diag.require(*props.density > 0.0, name, "density must be > 0");
        if (props.darcy_friction) {
            diag.require(*props.darcy_friction > 0.0 && *props.darcy_friction < 1.0, name,
                         "Darcy friction factor must lie in (0, 1)");
        }
        for (auto field : {props.gravity, props.compressibility, props.temperature}) {
            if (field) diag.require(*field > 0.0, name, "gas constants must be > 0");
        }
    }
}

void check_nodes(const EnergySystemModel& m, Diagnostics& diag) {
    std::set<std::string> seen;
    for (const auto& node : m.nodes) {
        const std::string name = "node " + node.id;
        diag.require(valid_id(node.id), name, "id must match [A-Za-z][A-Za-z0-9_]*");
        diag.require(seen.insert(node.id).second, name, "duplicate node id");
        for (const auto& [carrier, p] : node.pressures) {
            diag.require(is_fluid(carrier), name,
                         "pressure given for non-fluid carrier " +
                             std::string(to_string(carrier)));
            diag.require(p.nominal > 0.0, name, "nominal pressure must be > 0");
            if (p.nominal_out) {
                diag.require(*p.nominal_out > 0.0, name,
                             "nominal outlet pressure must be > 0");
            }
            if (p.max_deviation) {
                diag.require(*p.max_deviation >= 0.0 && *p.max_deviation <= 1.0, name,
                             "max pressure deviation must lie in [0, 1]");
            }
        }
    }
}

std::optional<double> node_pressure(const EnergySystemModel& m, const std::string& node,
                                    Carrier c, Terminal t) {
    const Node* n = m.find_node(node);
    if (!n) return std::nullopt;
    auto it = n->pressures.find(c);
    if (it == n->pressures.end()) return std::nullopt;
    return it->second.nominal_at(t);
}

void check_loss_table(const Edge& e, Diagnostics& diag) {
    const std::string name = "edge " + e.id;
    if (e.losses.empty()) return;
    const auto& first = e.losses.front();
    diag.require(first.flow == 0.0 && first.loss == 0.0, name,
                 "loss table must start at (0, 0)");
    for (std::size_t i = 0; i < e.losses.size(); ++i) {
        diag.require(e.losses[i].loss >= 0.0, name, "loss table has negative losses");
        if (i == 0) continue;
        const auto& a = e.losses[i - 1];
        const auto& b = e.losses[i];
        if (b.flow <= a.flow) {
            diag.add(name, "loss table flows must be strictly increasing");
            return;
        }
        diag.require(b.loss >= a.loss, name, "loss table must be nondecreasing");
        if (i >= 2) {
            const auto& z = e.losses[i - 2];
            const double s1 = (a.loss - z.loss) / (a.flow - z.flow);
            const double s2 = (b.loss - a.loss) / (b.flow - a.flow);
            diag.require(s2 >= s1 - 1e-12, name, "loss table must be convex");
        }
    }
    if (e.max_flow) {
        diag.require(e.losses.back().flow >= *e.max_flow, name,
                     "loss table must cover the edge capacity");
    }
}

void check_edges(const EnergySystemModel& m, Diagnostics& diag) {
    std::set<std::string> seen;
    for (const auto& e : m.edges) {
        const std::string name = "edge " + e.id;
        diag.require(valid_id(e.id), name, "id must match [A-Za-z][A-Za-z0-9_]*");
        diag.require(seen.insert(e.id).second, name, "duplicate edge id");
        diag.require(e.carrier != Carrier::Wellstream, name,
                     "wellstream is split at the well and cannot flow on edges");
        if (!m.find_node(e.from)) diag.add(name, "from-node '" + e.from + "' does not exist");
        if (!m.find_node(e.to)) diag.add(name, "to-node '" + e.to + "' does not exist");
        if (e.max_flow) diag.require(*e.max_flow > 0.0, name, "max flow must be > 0");
        check_loss_table(e, diag);
        switch (e.model) {
            case FlowModel::Transport:
                break;
            case FlowModel::DcPower:
                diag.require(e.carrier == Carrier::Electricity, name,
                             "dc-power model applies to electricity edges only");
                diag.require(e.reactance && *e.reactance > 0.0, name,
                             "dc-power edge needs reactance > 0");
                break;
            case FlowModel::Weymouth: {
                diag.require(e.carrier == Carrier::Gas, name,
                             "Weymouth model applies to gas edges only");
                const auto& gas = m.carrier(Carrier::Gas);
                const bool params = e.diameter_mm && e.length_km && e.base_temperature &&
                                    e.base_pressure && gas.gravity && gas.temperature &&
                                    gas.compressibility;
                diag.require(params, name,
                             "Weymouth edge needs diameter, length, base temperature and "
                             "pressure, and gas gravity/temperature/compressibility");
                auto p1 = node_pressure(m, e.from, e.carrier, Terminal::Out);
                auto p2 = node_pressure(m, e.to, e.carrier, Terminal::In);
                diag.require(p1 && p2, name,
                             "Weymouth edge needs nominal pressures at both end nodes");
                if (params && p1 && p2 && m.find_node(e.from) && m.find_node(e.to)) {
                    try {
                        const auto pipe = physics::weymouth_pipe(
                            *e.diameter_mm, *e.length_km, m.find_node(e.from)->elevation,
                            m.find_node(e.to)->elevation, *e.base_temperature,
                            *e.base_pressure, *gas.gravity, *gas.temperature,
                            *gas.compressibility);
                        physics::linearize_weymouth(pipe, *p1, *p2);
                    } catch (const DomainError& err) {
                        diag.add(name, err.what());
                    }
                }
                break;
            }
            case FlowModel::Darcy: {
                diag.require(e.carrier == Carrier::Oil || e.carrier == Carrier::Water, name,
                             "Darcy-Weisbach model applies to liquid edges only");
                const auto& liquid = m.carrier(e.carrier);
                const bool params = e.diameter_mm && e.length_km && liquid.density &&
                                    liquid.darcy_friction;
                diag.require(params, name,
                             "Darcy edge needs diameter, length, and carrier density and "
                             "friction factor");
                auto p1 = node_pressure(m, e.from, e.carrier, Terminal::Out);
                auto p2 = node_pressure(m, e.to, e.carrier, Terminal::In);
                diag.require(p1 && p2, name,
                             "Darcy edge needs nominal pressures at both end nodes");
                if (params && p1 && p2 && m.find_node(e.from) && m.find_node(e.to)) {
                    try {
                        const auto pipe = physics::darcy_pipe(
                            *e.diameter_mm, *e.length_km, *liquid.darcy_friction,
                            *liquid.density, m.find_node(e.from)->elevation,
                            m.find_node(e.to)->elevation);
                        physics::linearize_darcy(pipe, *p1, *p2);
                    } catch (const DomainError& err) {
                        diag.add(name, err.what());
                    }
                }
                break;
            }
        }
    }
}

void check_dc_references(const EnergySystemModel& m, Diagnostics& diag) {
    // Union-find over nodes joined by dc-power edges.
    std::map<std::string, std::string> parent;
    std::function<std::string(const std::string&)> root = [&](const std::string& x) {
        auto it = parent.find(x);
        if (it == parent.end() || it->second == x) return x;
        return it->second = root(it->second);
    };
    for (const auto& e : m.edges) {
        if (e.model != FlowModel::DcPower || !m.find_node(e.from) || !m.find_node(e.to)) {
            continue;
        }
        parent.try_emplace(e.from, e.from);
        parent.try_emplace(e.to, e.to);
        parent[root(e.from)] = root(e.to);
    }
    std::map<std::string, bool> has_reference;
    for (const auto& [node, _] : parent) {
        const bool ref = m.find_node(node)->angle_reference;
        has_reference[root(node)] = has_reference[root(node)] || ref;
    }
    for (const auto& [component, ok] : has_reference) {
        diag.require(ok, "node " + component,
                     "dc-power subnetwork containing this node has no angle reference node");
    }
}

void check_penalty(const DeviceSpec& d, const std::string& name, Diagnostics& diag) {
    if (!d.penalty) return;
    const auto& bp = d.penalty->breakpoints;
    if (bp.size() < 2) {
        diag.add(name, "penalty curve needs at least two breakpoints");
        return;
    }
    for (std::size_t i = 1; i < bp.size(); ++i) {
        if (bp[i].flow <= bp[i - 1].flow) {
            diag.add(name, "penalty breakpoint flows must be strictly increasing");
            return;
        }
    }
    diag.require(bp.front().flow <= 0.0 && bp.back().flow >= d.flow_max, name,
                 "penalty curve must cover [0, flow_max]");
}

void check_device(const EnergySystemModel& m, const DeviceSpec& d, Diagnostics& diag) {
    const std::string name = "device " + d.id;
    diag.require(valid_id(d.id), name, "id must match [A-Za-z][A-Za-z0-9_]*");
    if (!m.find_node(d.node)) diag.add(name, "node '" + d.node + "' does not exist");
    if (d.profile && !m.profiles.find(*d.profile)) {
        diag.add(name, "profile '" + *d.profile + "' does not exist");
    }
    diag.require(d.flow_max > 0.0, name, "flow_max must be > 0");
    diag.require(d.flow_min >= 0.0 && d.flow_min <= d.flow_max, name,
                 "flow bounds must satisfy 0 <= flow_min <= flow_max");
    if (d.ramp_up) diag.require(*d.ramp_up >= 0.0, name, "ramp limits must be >= 0");
    if (d.ramp_down) diag.require(*d.ramp_down >= 0.0, name, "ramp limits must be >= 0");
    if (d.start_stop) {
        diag.require(d.start_stop->delay_steps >= 0, name, "start delay must be >= 0");
    }
    diag.require(d.reserve_factor >= 0.0 && d.reserve_factor <= 1.0, name,
                 "reserve factor must lie in [0, 1]");
    diag.require(d.load_reserve_factor >= 0.0 && d.load_reserve_factor <= 1.0, name,
                 "load reserve factor must lie in [0, 1]");
    diag.require(d.storage_penalty >= 0.0, name, "storage penalty must be >= 0");
    check_penalty(d, name, diag);

    const auto& gas = m.carrier(Carrier::Gas);
    const auto& hydrogen = m.carrier(Carrier::Hydrogen);
    switch (d.type()) {
        case DeviceType::Well: {
            const auto& p = d.as<WellParams>();
            diag.require(p.water_cut >= 0.0 && p.water_cut < 1.0, name,
                         "water cut must lie in [0, 1)");
            diag.require(p.gas_oil_ratio >= 0.0, name, "gas-oil ratio must be >= 0");
            diag.require(p.injection_ratio >= 0.0, name, "injection ratio must be >= 0");
            break;
        }
        case DeviceType::Separator: {
            const auto& p = d.as<SeparatorParams>();
            diag.require(p.heat_factor >= 0.0 && p.el_factor >= 0.0, name,
                         "separator demand factors must be >= 0");
            break;
        }
        case DeviceType::Compressor: {
            const auto& p = d.as<CompressorParams>();
            diag.require(in_unit_interval_open_closed(p.isentropic_efficiency), name,
                         "isentropic efficiency must lie in (0, 1]");
            diag.require(p.heat_capacity_ratio > 1.0, name, "heat capacity ratio must be > 1");
            diag.require(p.nominal_flow.has_value(), name, "compressor needs a nominal flow");
            const auto nominal = nominal_pressures(m, d);
            diag.require(nominal.has_value(), name,
                         "compressor needs nominal inlet and outlet pressures");
            if (nominal) {
                diag.require(nominal->first > 0.0 && nominal->second > 0.0, name,
                             "compressor nominal pressures must be > 0");
            }
            if (p.drive == CompressorDrive::Gas) {
                diag.require(gas.calorific_value.has_value(), name,
                             "gas-driven compressor needs the gas calorific value");
            }
            break;
        }
        case DeviceType::Pump: {
            const auto& p = d.as<PumpParams>();
            diag.require(in_unit_interval_open_closed(p.efficiency), name,
                         "pump efficiency must lie in (0, 1]");
            diag.require(p.carrier == Carrier::Oil || p.carrier == Carrier::Water, name,
                         "pumps move oil or water");
            diag.require(nominal_pressures(m, d).has_value(), name,
                         "pump needs nominal inlet and outlet pressures");
            break;
        }
        case DeviceType::GasTurbine: {
            const auto& p = d.as<GasTurbineParams>();
            diag.require(p.fuel_a >= 0.0 && p.fuel_b >= 0.0, name,
                         "fuel coefficients must be >= 0");
            diag.require(p.heat_efficiency >= 0.0 && p.heat_efficiency <= 1.0, name,
                         "heat recovery efficiency must lie in [0, 1]");
            diag.require(gas.calorific_value.has_value(), name,
                         "gas turbine needs the gas calorific value");
            break;
        }
        case DeviceType::Heater:
            diag.require(d.as<HeaterParams>().efficiency > 0.0, name,
                         "heater efficiency must be > 0");
            break;
        case DeviceType::Source:
            diag.require(d.as<SourceParams>().carrier != Carrier::Wellstream, name,
                         "wellstream sources are modelled as wells");
            break;
        case DeviceType::Sink:
            diag.require(d.as<SinkParams>().carrier != Carrier::Wellstream, name,
                         "wellstream sinks are not supported");
            break;
        case DeviceType::Battery: {
            const auto& p = d.as<BatteryParams>();
            diag.require(in_unit_interval_open_closed(p.efficiency), name,
                         "battery efficiency must lie in (0, 1]");
            diag.require(p.energy_min >= 0.0 && p.energy_min <= p.energy_max, name,
                         "battery levels must satisfy 0 <= E_min <= E_max");
            diag.require(p.reserve_time > 0.0, name, "reserve time must be > 0");
            if (p.charge_max) diag.require(*p.charge_max >= 0.0, name, "charge_max must be >= 0");
            if (p.big_m) diag.require(*p.big_m > d.flow_max, name, "big-M must exceed flow_max");
            if (p.initial_level) {
                diag.require(*p.initial_level >= p.energy_min && *p.initial_level <= p.energy_max,
                             name, "initial level must lie in [E_min, E_max]");
            }
            break;
        }
        case DeviceType::HydrogenStorage: {
            const auto& p = d.as<HydrogenStorageParams>();
            diag.require(p.energy_min >= 0.0 && p.energy_min <= p.energy_max, name,
                         "storage levels must satisfy 0 <= E_min <= E_max");
            if (p.initial_level) {
                diag.require(*p.initial_level >= p.energy_min && *p.initial_level <= p.energy_max,
                             name, "initial level must lie in [E_min, E_max]");
            }
            break;
        }
        case DeviceType::Electrolyser: {
            const auto& p = d.as<ElectrolyserParams>();
            diag.require(in_unit_interval_open_closed(p.efficiency), name,
                         "electrolyser efficiency must lie in (0, 1]");
            diag.require(p.heat_efficiency >= 0.0 && p.heat_efficiency <= 1.0, name,
                         "heat recovery efficiency must lie in [0, 1]");
            diag.require(hydrogen.calorific_value.has_value(), name,
                         "electrolyser needs the hydrogen calorific value");
            break;
        }
        case DeviceType::FuelCell: {
            const auto& p = d.as<FuelCellParams>();
            diag.require(in_unit_interval_open_closed(p.efficiency), name,
                         "fuel cell efficiency must lie in (0, 1]");
            diag.require(p.heat_efficiency >= 0.0 && p.heat_efficiency <= 1.0, name,
                         "heat recovery efficiency must lie in [0, 1]");
            diag.require(hydrogen.calorific_value.has_value(), name,
                         "fuel cell needs the hydrogen calorific value");
            break;
        }
    }
}

void check_profiles(const TimeSeriesSet& series, Diagnostics& diag) {
    std::set<std::string> seen;
    for (const auto& p : series.profiles) {
        const std::string name = "profile " + p.id;
        diag.require(seen.insert(p.id).second, name, "duplicate profile id");
        const bool nonneg = std::all_of(p.forecast.begin(), p.forecast.end(),
                                        [](double v) { return v >= 0.0; }) &&
                            (!p.nowcast || std::all_of(p.nowcast->begin(), p.nowcast->end(),
                                                       [](double v) { return v >= 0.0; }));
        diag.require(nonneg, name, "profile values must be >= 0");
        if (p.nowcast) {
            diag.require(p.nowcast->size() == p.forecast.size(), name,
                         "forecast and nowcast lengths differ");
        }
    }
}

}  // namespace

std::vector<Diagnostic> validate_model(const EnergySystemModel& model) {
    Diagnostics diag;
    check_carriers(model, diag);
    check_nodes(model, diag);
    check_edges(model, diag);
    check_dc_references(model, diag);
    std::set<std::string> seen;
    for (const auto& d : model.devices) {
        diag.require(seen.insert(d.id).second, "device " + d.id, "duplicate device id");
        check_device(model, d, diag);
    }
    check_profiles(model.profiles, diag);
    return diag.take();
}

std::vector<Diagnostic> validate_config(const SimulationConfig& c,
                                        const EnergySystemModel& model) {
    Diagnostics diag;
    const std::string name = "simulation";
    diag.require(c.timestep_minutes > 0.0, name, "timestep must be > 0");
    diag.require(c.reoptimisation_steps >= 1, name, "re-optimisation interval must be >= 1 step");
    diag.require(c.horizon_steps >= c.reoptimisation_steps, name,
                 "horizon must be >= re-optimisation interval");
    diag.require(c.nowcast_steps >= 0 && c.nowcast_steps <= c.horizon_steps, name,
                 "nowcast window must lie in [0, horizon]");
    diag.require(c.reserve_min >= 0.0, name, "reserve requirement must be >= 0");
    diag.require(c.solver.mip_gap >= 0.0, name, "MIP gap must be >= 0");
    diag.require(c.solver.time_limit_s > 0.0, name, "time limit must be > 0");
    diag.require(c.s_base > 0.0, name, "S_base must be > 0");
    if (c.steps) diag.require(*c.steps >= 0, name, "steps must be >= 0");
    if (c.emission_cap) {
        diag.require(*c.emission_cap >= 0.0, name, "emission cap must be >= 0");
        diag.require(model.carrier(Carrier::Gas).co2_content.has_value(), name,
                     "emission cap needs the gas CO2 content");
    }
    for (const auto& [profile, sigma] : c.forecast_noise) {
        diag.require(sigma >= 0.0, name, "forecast noise for '" + profile + "' must be >= 0");
        const Profile* p = model.profiles.find(profile);
        diag.require(p && p->nowcast, name,
                     "forecast noise needs a nowcast for profile '" + profile + "'");
    }
    for (const auto& d : model.devices) {
        if (d.start_stop) {
            diag.require(c.horizon_steps >= d.start_stop->delay_steps + 1, "device " + d.id,
                         "horizon must be longer than the start-up delay");
        }
    }
    return diag.take();
}

double profile_value(const Profile& profile, long t, long horizon_offset,
                     long nowcast_window) {
    const long index = t + horizon_offset;
    const long length = static_cast<long>(profile.forecast.size());
    if (index < 0 || index >= length) throw OutOfDataError(profile.id, index, length);
    if (profile.nowcast && horizon_offset < nowcast_window) return (*profile.nowcast)[index];
    return profile.forecast[index];
}

std::vector<double> generate_forecast_from_nowcast(std::span<const double> nowcast,
                                                   double sigma, std::uint64_t seed) {
    if (sigma < 0.0) throw DomainError("forecast noise sigma must be >= 0");
    std::vector<double> out(nowcast.begin(), nowcast.end());
    if (sigma == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& v : out) v = std::max(0.0, v + noise(rng));
    return out;
}

std::map<std::string, std::vector<double>> forecast_view(const TimeSeriesSet& profiles, long t0,
                                                         long horizon, long nowcast_window) {
    std::map<std::string, std::vector<double>> view;
    for (const auto& p : profiles.profiles) {
        auto& values = view[p.id];
        values.reserve(static_cast<std::size_t>(std::max(0L, horizon)));
        for (long k = 0; k < horizon; ++k) {
            values.push_back(profile_value(p, t0, k, nowcast_window));
        }
    }
    return view;
}

void apply_forecast_noise(TimeSeriesSet& profiles, const SimulationConfig& config) {
    for (std::size_t i = 0; i < profiles.profiles.size(); ++i) {
        auto& p = profiles.profiles[i];
        auto it = config.forecast_noise.find(p.id);
        if (it == config.forecast_noise.end()) continue;
        if (!p.nowcast) throw ConfigError("profile '" + p.id + "' has no nowcast to perturb");
        const std::uint64_t seed = config.seed ^ (0x9E3779B97F4A7C15ULL * (i + 1));
        p.forecast = generate_forecast_from_nowcast(*p.nowcast, it->second, seed);
    }
}

}  // namespace platopt
