#include "platopt/io.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace platopt {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string fmt_double(double v) { return fmt::format("{}", v); }

struct UnitFactor {
    std::string_view unit;
    double factor;  // to the internal unit
};

std::vector<UnitFactor> units_of(Dimension d) {
    switch (d) {
        case Dimension::Dimensionless: return {};
        case Dimension::Time: return {{"s", 1.0 / 60.0}, {"min", 1.0}, {"h", 60.0}, {"day", 1440.0}};
        case Dimension::Power: return {{"W", 1e-6}, {"kW", 1e-3}, {"MW", 1.0}, {"GW", 1e3}};
        case Dimension::Energy: return {{"kWh", 1e-3}, {"MWh", 1.0}, {"GWh", 1e3}};
        case Dimension::VolumeFlow:
            return {{"Sm3/s", 1.0},          {"Sm3/h", 1.0 / 3600.0}, {"Sm3/day", 1.0 / 86400.0},
                    {"MSm3/day", 1e6 / 86400.0}, {"m3/s", 1.0},      {"m3/h", 1.0 / 3600.0},
                    {"m3/day", 1.0 / 86400.0}};
        case Dimension::Volume: return {{"Sm3", 1.0}, {"MSm3", 1e6}, {"m3", 1.0}};
        case Dimension::Pressure: return {{"Pa", 1e-6}, {"kPa", 1e-3}, {"bar", 0.1}, {"MPa", 1.0}};
        case Dimension::Length: return {{"mm", 1e-3}, {"m", 1.0}, {"km", 1e3}};
        case Dimension::Temperature: return {{"K", 1.0}};
        case Dimension::MassFlow: return {{"kg/s", 1.0}, {"kg/h", 1.0 / 3600.0}, {"t/h", 1.0 / 3.6}};
        case Dimension::ApparentPower: return {{"kVA", 1e-3}, {"MVA", 1.0}};
        case Dimension::HeatingValue: return {{"kJ/Sm3", 1e-3}, {"MJ/Sm3", 1.0}};
        case Dimension::Density: return {{"kg/Sm3", 1.0}, {"kg/m3", 1.0}};
    }
    return {};
}

std::string_view dimension_name(Dimension d) {
    switch (d) {
        case Dimension::Dimensionless: return "dimensionless number";
        case Dimension::Time: return "time";
        case Dimension::Power: return "power";
        case Dimension::Energy: return "energy";
        case Dimension::VolumeFlow: return "volume flow";
        case Dimension::Volume: return "volume";
        case Dimension::Pressure: return "pressure";
        case Dimension::Length: return "length";
        case Dimension::Temperature: return "temperature";
        case Dimension::MassFlow: return "mass flow";
        case Dimension::ApparentPower: return "apparent power";
        case Dimension::HeatingValue: return "heating value";
        case Dimension::Density: return "density";
    }
    return "quantity";
}

struct Quantity {
    double value = 0.0;
    std::string unit;
};

Quantity split_quantity(std::string_view text) {
    text = trim(text);
    std::size_t split = text.size();
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        const bool numeric = std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
                             c == '-' || c == '+' ||
                             ((c == 'e' || c == 'E') && i > 0 && i + 1 < text.size() &&
                              (std::isdigit(static_cast<unsigned char>(text[i + 1])) ||
                               text[i + 1] == '-' || text[i + 1] == '+'));
        if (!numeric) {
            split = i;
            break;
        }
    }
    const auto number = parse_double(text.substr(0, split));
    if (!number) throw ConfigError(fmt::format("'{}' is not a number", text));
    return {*number, std::string(trim(text.substr(split)))};
}

// Factor converting `unit` into `target`; exactly 1 when they coincide.
double conversion(Dimension d, const std::string& unit, std::string_view target) {
    const auto table = units_of(d);
    auto find = [&](std::string_view u) -> const UnitFactor* {
        for (const auto& f : table) {
            if (f.unit == u) return &f;
        }
        return nullptr;
    };
    const UnitFactor* from = find(unit);
    if (!from) {
        std::string known;
        for (const auto& f : table) known += (known.empty() ? "" : ", ") + std::string(f.unit);
        if (unit.empty()) {
            throw ConfigError(fmt::format("missing unit for {} (use one of: {})",
                                          dimension_name(d), known));
        }
        throw ConfigError(fmt::format("unit '{}' is not a {} unit (use one of: {})", unit,
                                      dimension_name(d), known));
    }
    if (from->unit == target) return 1.0;
    const UnitFactor* to = find(target);
    return from->factor / to->factor;
}

double parse_as(std::string_view text, Dimension d, std::string_view target) {
    const Quantity q = split_quantity(text);
    if (d == Dimension::Dimensionless) {
        if (!q.unit.empty()) throw ConfigError(fmt::format("'{}' must be a plain number", text));
        return q.value;
    }
    return q.value * conversion(d, q.unit, target);
}

// ---- strict YAML reading ----------------------------------------------------

std::string where(const YAML::Node& n) {
    const auto m = n.Mark();
    if (m.is_null()) return "";
    return fmt::format("line {}, column {}: ", m.line + 1, m.column + 1);
}

[[noreturn]] void fail(const YAML::Node& n, const std::string& message) {
    throw ConfigError(where(n) + message);
}

class Section {
public:
    Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
        if (!node_.IsMap()) fail(node_, path_ + " must be a mapping");
    }

    // Unknown keys are rejected with their location.
    ~Section() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!used_.count(key)) {
                fail(kv.first, fmt::format("unknown key '{}' in {}", key, path_));
            }
        }
    }

    Section(const Section&) = delete;
    Section& operator=(const Section&) = delete;

    bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }

    YAML::Node take(const std::string& key) {
        used_.insert(key);
        return node_[key];
    }

    YAML::Node require(const std::string& key) {
        YAML::Node n = take(key);
        if (!n) fail(node_, fmt::format("{} is missing '{}'", path_, key));
        return n;
    }

    std::string scalar(const YAML::Node& n, const std::string& key) const {
        if (!n.IsScalar()) fail(n, fmt::format("{}.{} must be a scalar", path_, key));
        return n.Scalar();
    }

    std::string string(const std::string& key) { return scalar(require(key), key); }

    std::optional<std::string> maybe_string(const std::string& key) {
        YAML::Node n = take(key);
        if (!n) return std::nullopt;
        return scalar(n, key);
    }

    double quantity(const std::string& key, Dimension d, std::string_view target) {
        YAML::Node n = require(key);
        return convert(n, key, d, target);
    }

    std::optional<double> maybe_quantity(const std::string& key, Dimension d,
                                         std::string_view target) {
        YAML::Node n = take(key);
        if (!n) return std::nullopt;
        return convert(n, key, d, target);
    }

    double quantity_or(const std::string& key, Dimension d, std::string_view target,
                       double fallback) {
        return maybe_quantity(key, d, target).value_or(fallback);
    }

    double number_or(const std::string& key, double fallback) {
        return quantity_or(key, Dimension::Dimensionless, "", fallback);
    }

    std::optional<double> maybe_number(const std::string& key) {
        return maybe_quantity(key, Dimension::Dimensionless, "");
    }

    std::optional<bool> maybe_bool(const std::string& key) {
        YAML::Node n = take(key);
        if (!n) return std::nullopt;
        const std::string s = scalar(n, key);
        if (s == "true" || s == "yes") return true;
        if (s == "false" || s == "no") return false;
        fail(n, fmt::format("{}.{} must be true or false", path_, key));
    }

    double convert(const YAML::Node& n, const std::string& key, Dimension d,
                   std::string_view target) const {
        const std::string s = scalar(n, key);
        try {
            return parse_as(s, d, target);
        } catch (const ConfigError& e) {
            fail(n, fmt::format("{}.{}: {}", path_, key, e.what()));
        }
    }

    const std::string& path() const { return path_; }
    const YAML::Node& node() const { return node_; }

private:
    YAML::Node node_;
    std::string path_;
    std::set<std::string> used_;
};

Carrier parse_carrier(const YAML::Node& n, const std::string& text) {
    auto c = carrier_from_string(text);
    if (!c) fail(n, fmt::format("unknown carrier '{}'", text));
    return *c;
}

// Flow quantities are power for electricity and heat, volume flow otherwise.
Dimension flow_dimension(Carrier c) {
    return c == Carrier::Electricity || c == Carrier::Heat ? Dimension::Power
                                                           : Dimension::VolumeFlow;
}

std::string_view flow_unit(Carrier c) { return c == Carrier::Electricity || c == Carrier::Heat ? "MW" : "Sm3/s"; }

// Carrier whose flow is the device's generic flow f.
Carrier primary_carrier(const DeviceSpec& d) {
    switch (d.type()) {
        case DeviceType::Well: return Carrier::Wellstream;
        case DeviceType::Separator: return Carrier::Wellstream;
        case DeviceType::Compressor: return Carrier::Gas;
        case DeviceType::Pump: return d.as<PumpParams>().carrier;
        case DeviceType::GasTurbine: return Carrier::Electricity;
        case DeviceType::Heater: return Carrier::Electricity;
        case DeviceType::Source: return d.as<SourceParams>().carrier;
        case DeviceType::Sink: return d.as<SinkParams>().carrier;
        case DeviceType::Battery: return Carrier::Electricity;
        case DeviceType::HydrogenStorage: return Carrier::Hydrogen;
        case DeviceType::Electrolyser: return Carrier::Electricity;
        case DeviceType::FuelCell: return Carrier::Electricity;
    }
    return Carrier::Electricity;
}

class StepReader {
public:
    explicit StepReader(double timestep_minutes) : dt_(timestep_minutes) {}

    int convert(Section& s, const YAML::Node& n, const std::string& key) const {
        const std::string text = s.scalar(n, key);
        Quantity q;
        try {
            q = split_quantity(text);
        } catch (const ConfigError& e) {
            fail(n, fmt::format("{}.{}: {}", s.path(), key, e.what()));
        }
        double steps = q.value;
        if (q.unit != "steps" && q.unit != "step") {
            try {
                steps = q.value * conversion(Dimension::Time, q.unit, "min") / dt_;
            } catch (const ConfigError& e) {
                fail(n, fmt::format("{}.{}: {} (or 'steps')", s.path(), key, e.what()));
            }
        }
        const double rounded = std::round(steps);
        if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, std::abs(steps))) {
            fail(n, fmt::format("{}.{}: '{}' is not a whole number of {} min steps", s.path(),
                                key, text, fmt_double(dt_)));
        }
        return static_cast<int>(rounded);
    }

    int required(Section& s, const std::string& key) const {
        return convert(s, s.require(key), key);
    }

    std::optional<int> optional(Section& s, const std::string& key) const {
        YAML::Node n = s.take(key);
        if (!n) return std::nullopt;
        return convert(s, n, key);
    }

private:
    double dt_;
};

SimulationConfig parse_simulation(const YAML::Node& node) {
    Section s(node, "simulation");
    SimulationConfig c;
    c.timestep_minutes = s.quantity("timestep", Dimension::Time, "min");
    if (c.timestep_minutes <= 0.0) fail(s.node(), "simulation.timestep must be > 0");
    StepReader steps(c.timestep_minutes);
    c.horizon_steps = steps.required(s, "horizon");
    c.reoptimisation_steps = steps.required(s, "reoptimisation_interval");
    c.nowcast_steps = steps.optional(s, "nowcast_window").value_or(0);
    c.steps = steps.optional(s, "span");
    c.reserve_min = s.quantity_or("reserve_min", Dimension::Power, "MW", 0.0);
    c.emission_cap = s.maybe_quantity("emission_cap", Dimension::MassFlow, "kg/s");
    c.solver.mip_gap = s.number_or("mip_gap", c.solver.mip_gap);
    c.solver.time_limit_s = s.quantity_or("time_limit", Dimension::Time, "s", c.solver.time_limit_s);
    if (YAML::Node n = s.take("seed")) {
        const std::string text = s.scalar(n, "seed");
        std::uint64_t seed = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            fail(n, "simulation.seed must be a non-negative integer");
        }
        c.seed = seed;
    }
    c.elastic = s.maybe_bool("elastic").value_or(false);
    c.s_base = s.quantity_or("s_base", Dimension::ApparentPower, "MVA", c.s_base);
    c.timeseries = s.maybe_string("timeseries").value_or("");
    if (YAML::Node n = s.take("forecast_noise")) {
        Section noise(n, "simulation.forecast_noise");
        for (const auto& kv : n) {
            const auto id = kv.first.as<std::string>();
            c.forecast_noise[id] = noise.convert(noise.take(id), id, Dimension::Dimensionless, "");
        }
    }
    return c;
}

std::map<Carrier, CarrierProperties> parse_carriers(const YAML::Node& node) {
    if (!node.IsMap()) fail(node, "carriers must be a mapping");
    Section outer(node, "carriers");
    std::map<Carrier, CarrierProperties> out;
    for (const auto& kv : node) {
        const auto name = kv.first.as<std::string>();
        const Carrier c = parse_carrier(kv.first, name);
        Section s(outer.take(name), "carriers." + name);
        CarrierProperties p;
        p.calorific_value = s.maybe_quantity("calorific_value", Dimension::HeatingValue, "MJ/Sm3");
        p.co2_content = s.maybe_quantity("co2_content", Dimension::Density, "kg/Sm3");
        p.gravity = s.maybe_number("gravity");
        p.compressibility = s.maybe_number("compressibility");
        p.temperature = s.maybe_quantity("temperature", Dimension::Temperature, "K");
        p.density = s.maybe_quantity("density", Dimension::Density, "kg/m3");
        p.darcy_friction = s.maybe_number("darcy_friction");
        out[c] = p;
    }
    return out;
}

std::vector<YAML::Node> sequence(const YAML::Node& n, const std::string& what) {
    if (!n.IsSequence()) fail(n, what + " must be a list");
    std::vector<YAML::Node> out;
    for (const auto& item : n) out.push_back(item);
    return out;
}

Node parse_node(const YAML::Node& n, std::size_t index) {
    Section s(n, fmt::format("nodes[{}]", index));
    Node node;
    node.id = s.string("id");
    node.elevation = s.quantity_or("elevation", Dimension::Length, "m", 0.0);
    node.angle_reference = s.maybe_bool("angle_reference").value_or(false);
    if (YAML::Node p = s.take("pressures")) {
        Section ps(p, "nodes." + node.id + ".pressures");
        for (const auto& kv : p) {
            const auto name = kv.first.as<std::string>();
            const Carrier c = parse_carrier(kv.first, name);
            Section one(ps.take(name), "nodes." + node.id + ".pressures." + name);
            NodePressure np;
            np.nominal = one.quantity("nominal", Dimension::Pressure, "MPa");
            np.nominal_out = one.maybe_quantity("nominal_out", Dimension::Pressure, "MPa");
            np.max_deviation = one.maybe_number("max_deviation");
            node.pressures[c] = np;
        }
    }
    return node;
}

Edge parse_edge(const YAML::Node& n, std::size_t index) {
    Section s(n, fmt::format("edges[{}]", index));
    Edge e;
    e.id = s.string("id");
    {
        YAML::Node c = s.require("carrier");
        e.carrier = parse_carrier(c, s.scalar(c, "carrier"));
    }
    e.from = s.string("from");
    e.to = s.string("to");
    const Dimension dim = flow_dimension(e.carrier);
    const std::string_view unit = flow_unit(e.carrier);
    e.max_flow = s.maybe_quantity("max_flow", dim, unit);
    e.bidirectional = s.maybe_bool("bidirectional").value_or(false);
    if (YAML::Node m = s.take("model")) {
        const std::string text = s.scalar(m, "model");
        auto model = flow_model_from_string(text);
        if (!model) fail(m, fmt::format("unknown flow model '{}'", text));
        e.model = *model;
    }
    e.reactance = s.maybe_number("reactance");
    if (YAML::Node losses = s.take("losses")) {
        std::size_t i = 0;
        for (const auto& item : sequence(losses, "edges." + e.id + ".losses")) {
            Section point(item, fmt::format("edges.{}.losses[{}]", e.id, i++));
            LossPoint lp;
            lp.flow = point.quantity("flow", dim, unit);
            lp.loss = point.quantity("loss", dim, unit);
            e.losses.push_back(lp);
        }
    }
    e.diameter_mm = s.maybe_quantity("diameter", Dimension::Length, "mm");
    e.length_km = s.maybe_quantity("length", Dimension::Length, "km");
    e.base_temperature = s.maybe_quantity("base_temperature", Dimension::Temperature, "K");
    e.base_pressure = s.maybe_quantity("base_pressure", Dimension::Pressure, "MPa");
    return e;
}

Carrier carrier_key(Section& s, const std::string& key, Carrier fallback) {
    YAML::Node n = s.take(key);
    if (!n) return fallback;
    return parse_carrier(n, s.scalar(n, key));
}

DeviceParams parse_params(Section& s, DeviceType type, const YAML::Node& type_node,
                          const std::string& id) {
    switch (type) {
        case DeviceType::Well: {
            WellParams p;
            p.gas_oil_ratio = s.number_or("gas_oil_ratio", 0.0);
            p.water_cut = s.number_or("water_cut", 0.0);
            p.injection_ratio = s.number_or("injection_ratio", 0.0);
            p.injection_pressure = s.maybe_quantity("injection_pressure", Dimension::Pressure, "MPa");
            p.separator_pressure = s.maybe_quantity("separator_pressure", Dimension::Pressure, "MPa");
            return p;
        }
        case DeviceType::Separator: {
            SeparatorParams p;
            p.heat_factor = s.number_or("heat_factor", 0.0);
            p.el_factor = s.number_or("el_factor", 0.0);
            if (YAML::Node o = s.take("outlet_pressure")) {
                Section os(o, "devices." + id + ".outlet_pressure");
                for (const auto& kv : o) {
                    const auto name = kv.first.as<std::string>();
                    const Carrier c = parse_carrier(kv.first, name);
                    p.outlet_pressure[c] =
                        os.convert(os.take(name), name, Dimension::Pressure, "MPa");
                }
            }
            return p;
        }
        case DeviceType::Compressor: {
            CompressorParams p;
            if (auto drive = s.maybe_string("drive")) {
                if (*drive == "electric") {
                    p.drive = CompressorDrive::Electric;
                } else if (*drive == "gas") {
                    p.drive = CompressorDrive::Gas;
                } else {
                    fail(s.node(), fmt::format("devices.{}.drive must be 'electric' or 'gas'", id));
                }
            }
            p.isentropic_efficiency = s.number_or("isentropic_efficiency", p.isentropic_efficiency);
            p.heat_capacity_ratio = s.number_or("heat_capacity_ratio", p.heat_capacity_ratio);
            p.compressibility = s.number_or("compressibility", p.compressibility);
            p.gas_constant = s.number_or("gas_constant", p.gas_constant);
            p.inlet_temperature =
                s.quantity_or("inlet_temperature", Dimension::Temperature, "K", p.inlet_temperature);
            p.density = s.quantity_or("density", Dimension::Density, "kg/Sm3", p.density);
            p.nominal_flow = s.maybe_quantity("nominal_flow", Dimension::VolumeFlow, "Sm3/s");
            p.nominal_inlet_pressure =
                s.maybe_quantity("nominal_inlet_pressure", Dimension::Pressure, "MPa");
            p.nominal_outlet_pressure =
                s.maybe_quantity("nominal_outlet_pressure", Dimension::Pressure, "MPa");
            return p;
        }
        case DeviceType::Pump: {
            PumpParams p;
            p.carrier = carrier_key(s, "carrier", p.carrier);
            p.efficiency = s.number_or("efficiency", p.efficiency);
            p.nominal_inlet_pressure =
                s.maybe_quantity("nominal_inlet_pressure", Dimension::Pressure, "MPa");
            p.nominal_outlet_pressure =
                s.maybe_quantity("nominal_outlet_pressure", Dimension::Pressure, "MPa");
            return p;
        }
        case DeviceType::GasTurbine: {
            GasTurbineParams p;
            p.fuel_a = s.number_or("fuel_a", 0.0);
            p.fuel_b = s.number_or("fuel_b", 0.0);
            p.heat_efficiency = s.number_or("heat_efficiency", 0.0);
            return p;
        }
        case DeviceType::Heater: {
            HeaterParams p;
            p.efficiency = s.number_or("efficiency", p.efficiency);
            return p;
        }
        case DeviceType::Source: {
            YAML::Node c = s.require("carrier");
            return SourceParams{parse_carrier(c, s.scalar(c, "carrier"))};
        }
        case DeviceType::Sink: {
            YAML::Node c = s.require("carrier");
            return SinkParams{parse_carrier(c, s.scalar(c, "carrier"))};
        }
        case DeviceType::Battery: {
            BatteryParams p;
            p.efficiency = s.number_or("efficiency", p.efficiency);
            p.energy_max = s.quantity("energy_max", Dimension::Energy, "MWh");
            p.energy_min = s.quantity_or("energy_min", Dimension::Energy, "MWh", 0.0);
            p.reserve_time = s.quantity_or("reserve_time", Dimension::Time, "h", p.reserve_time);
            p.charge_max = s.maybe_quantity("charge_max", Dimension::Power, "MW");
            p.initial_level = s.maybe_quantity("initial_level", Dimension::Energy, "MWh");
            p.big_m = s.maybe_number("big_m");
            return p;
        }
        case DeviceType::HydrogenStorage: {
            HydrogenStorageParams p;
            p.energy_max = s.quantity("energy_max", Dimension::Volume, "Sm3");
            p.energy_min = s.quantity_or("energy_min", Dimension::Volume, "Sm3", 0.0);
            p.target = s.maybe_quantity("target", Dimension::Volume, "Sm3");
            p.initial_level = s.maybe_quantity("initial_level", Dimension::Volume, "Sm3");
            return p;
        }
        case DeviceType::Electrolyser: {
            ElectrolyserParams p;
            p.efficiency = s.number_or("efficiency", p.efficiency);
            p.heat_efficiency = s.number_or("heat_efficiency", p.heat_efficiency);
            return p;
        }
        case DeviceType::FuelCell: {
            FuelCellParams p;
            p.efficiency = s.number_or("efficiency", p.efficiency);
            p.heat_efficiency = s.number_or("heat_efficiency", p.heat_efficiency);
            return p;
        }
    }
    fail(type_node, "unsupported device type");
}

DeviceSpec parse_device(const YAML::Node& n, std::size_t index, const StepReader& steps) {
    Section s(n, fmt::format("devices[{}]", index));
    DeviceSpec d;
    d.id = s.string("id");
    YAML::Node type_node = s.require("type");
    const std::string type_name = s.scalar(type_node, "type");
    auto type = device_type_from_string(type_name);
    if (!type) fail(type_node, fmt::format("unknown device type '{}'", type_name));
    d.node = s.string("node");
    d.params = parse_params(s, *type, type_node, d.id);

    const Carrier primary = primary_carrier(d);
    const Dimension dim = flow_dimension(primary);
    const std::string_view unit = flow_unit(primary);
    d.flow_max = s.quantity_or("flow_max", dim, unit, 0.0);
    d.flow_min = s.quantity_or("flow_min", dim, unit, 0.0);
    d.ramp_up = s.maybe_number("ramp_up");
    d.ramp_down = s.maybe_number("ramp_down");
    if (YAML::Node ss = s.take("start_stop")) {
        Section st(ss, "devices." + d.id + ".start_stop");
        StartStop x;
        x.delay_steps = steps.optional(st, "delay").value_or(0);
        x.start_penalty = st.number_or("start_penalty", 0.0);
        x.stop_penalty = st.number_or("stop_penalty", 0.0);
        d.start_stop = x;
    }
    if (YAML::Node pn = s.take("penalty")) {
        Section ps(pn, "devices." + d.id + ".penalty");
        PenaltyCurve curve;
        std::size_t i = 0;
        for (const auto& item : sequence(ps.require("breakpoints"),
                                         "devices." + d.id + ".penalty.breakpoints")) {
            Section bp(item, fmt::format("devices.{}.penalty.breakpoints[{}]", d.id, i++));
            PenaltyBreakpoint b;
            b.flow = bp.quantity("flow", dim, unit);
            b.penalty = bp.quantity("penalty", Dimension::Dimensionless, "");
            curve.breakpoints.push_back(b);
        }
        curve.on_cost = ps.number_or("on_cost", 0.0);
        curve.prep_cost = ps.number_or("prep_cost", 0.0);
        d.penalty = curve;
    }
    d.storage_penalty = s.number_or("storage_penalty", 0.0);
    d.profile = s.maybe_string("profile");
    d.reserve_factor = s.number_or("reserve_factor", 0.0);
    d.load_reserve_factor = s.number_or("load_reserve_factor", 0.0);
    d.initial_on = s.maybe_bool("initial_on");
    d.initial_flow = s.maybe_quantity("initial_flow", dim, unit);
    return d;
}

// ---- serialization ----------------------------------------------------------

std::string q(double v, std::string_view unit) {
    return unit.empty() ? fmt_double(v) : fmt::format("{} {}", fmt_double(v), unit);
}

std::string steps_text(int n) { return fmt::format("{} steps", n); }

void emit_device(YAML::Emitter& e, const DeviceSpec& d) {
    const Carrier primary = primary_carrier(d);
    const std::string_view unit = flow_unit(primary);
    e << YAML::BeginMap;
    e << YAML::Key << "id" << YAML::Value << d.id;
    e << YAML::Key << "type" << YAML::Value << std::string(to_string(d.type()));
    e << YAML::Key << "node" << YAML::Value << d.node;
    auto opt = [&](const char* key, const std::optional<double>& v, std::string_view u) {
        if (v) e << YAML::Key << key << YAML::Value << q(*v, u);
    };
    auto num = [&](const char* key, double v, std::string_view u = "") {
        e << YAML::Key << key << YAML::Value << q(v, u);
    };
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, WellParams>) {
                num("gas_oil_ratio", p.gas_oil_ratio);
                num("water_cut", p.water_cut);
                num("injection_ratio", p.injection_ratio);
                opt("injection_pressure", p.injection_pressure, "MPa");
                opt("separator_pressure", p.separator_pressure, "MPa");
            } else if constexpr (std::is_same_v<P, SeparatorParams>) {
                num("heat_factor", p.heat_factor);
                num("el_factor", p.el_factor);
                if (!p.outlet_pressure.empty()) {
                    e << YAML::Key << "outlet_pressure" << YAML::Value << YAML::BeginMap;
                    for (const auto& [c, v] : p.outlet_pressure) {
                        e << YAML::Key << std::string(to_string(c)) << YAML::Value << q(v, "MPa");
                    }
                    e << YAML::EndMap;
                }
            } else if constexpr (std::is_same_v<P, CompressorParams>) {
                e << YAML::Key << "drive" << YAML::Value
                  << (p.drive == CompressorDrive::Electric ? "electric" : "gas");
                num("isentropic_efficiency", p.isentropic_efficiency);
                num("heat_capacity_ratio", p.heat_capacity_ratio);
                num("compressibility", p.compressibility);
                num("gas_constant", p.gas_constant);
                num("inlet_temperature", p.inlet_temperature, "K");
                num("density", p.density, "kg/Sm3");
                opt("nominal_flow", p.nominal_flow, "Sm3/s");
                opt("nominal_inlet_pressure", p.nominal_inlet_pressure, "MPa");
                opt("nominal_outlet_pressure", p.nominal_outlet_pressure, "MPa");
            } else if constexpr (std::is_same_v<P, PumpParams>) {
                e << YAML::Key << "carrier" << YAML::Value << std::string(to_string(p.carrier));
                num("efficiency", p.efficiency);
                opt("nominal_inlet_pressure", p.nominal_inlet_pressure, "MPa");
                opt("nominal_outlet_pressure", p.nominal_outlet_pressure, "MPa");
            } else if constexpr (std::is_same_v<P, GasTurbineParams>) {
                num("fuel_a", p.fuel_a);
                num("fuel_b", p.fuel_b);
                num("heat_efficiency", p.heat_efficiency);
            } else if constexpr (std::is_same_v<P, HeaterParams>) {
                num("efficiency", p.efficiency);
            } else if constexpr (std::is_same_v<P, SourceParams> || std::is_same_v<P, SinkParams>) {
                e << YAML::Key << "carrier" << YAML::Value << std::string(to_string(p.carrier));
            } else if constexpr (std::is_same_v<P, BatteryParams>) {
                num("efficiency", p.efficiency);
                num("energy_max", p.energy_max, "MWh");
                num("energy_min", p.energy_min, "MWh");
                num("reserve_time", p.reserve_time, "h");
                opt("charge_max", p.charge_max, "MW");
                opt("initial_level", p.initial_level, "MWh");
                opt("big_m", p.big_m, "");
            } else if constexpr (std::is_same_v<P, HydrogenStorageParams>) {
                num("energy_max", p.energy_max, "Sm3");
                num("energy_min", p.energy_min, "Sm3");
                opt("target", p.target, "Sm3");
                opt("initial_level", p.initial_level, "Sm3");
            } else {
                num("efficiency", p.efficiency);
                num("heat_efficiency", p.heat_efficiency);
            }
        },
        d.params);
    num("flow_max", d.flow_max, unit);
    num("flow_min", d.flow_min, unit);
    opt("ramp_up", d.ramp_up, "");
    opt("ramp_down", d.ramp_down, "");
    if (d.start_stop) {
        e << YAML::Key << "start_stop" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "delay" << YAML::Value << steps_text(d.start_stop->delay_steps);
        num("start_penalty", d.start_stop->start_penalty);
        num("stop_penalty", d.start_stop->stop_penalty);
        e << YAML::EndMap;
    }
    if (d.penalty) {
        e << YAML::Key << "penalty" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "breakpoints" << YAML::Value << YAML::BeginSeq;
        for (const auto& b : d.penalty->breakpoints) {
            e << YAML::Flow << YAML::BeginMap;
            num("flow", b.flow, unit);
            num("penalty", b.penalty);
            e << YAML::EndMap;
        }
        e << YAML::EndSeq;
        num("on_cost", d.penalty->on_cost);
        num("prep_cost", d.penalty->prep_cost);
        e << YAML::EndMap;
    }
    num("storage_penalty", d.storage_penalty);
    if (d.profile) e << YAML::Key << "profile" << YAML::Value << *d.profile;
    num("reserve_factor", d.reserve_factor);
    num("load_reserve_factor", d.load_reserve_factor);
    if (d.initial_on) e << YAML::Key << "initial_on" << YAML::Value << (*d.initial_on ? "true" : "false");
    opt("initial_flow", d.initial_flow, unit);
    e << YAML::EndMap;
}

// ---- CSV helpers ------------------------------------------------------------

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    return lines;
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        auto end = line.find(',', start);
        if (end == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, end - start)));
        start = end + 1;
    }
    return cells;
}

std::string window_row(const WindowReport& w) {
    return fmt::format("{},{},{},{},{},{},{},{}\n", w.index, w.t0, w.committed, to_string(w.status),
                       fmt_double(w.objective), fmt_double(w.accounted_objective),
                       fmt_double(w.mip_gap), fmt_double(w.max_residual));
}

SolveStatus status_from_string(std::string_view s) {
    for (auto st : {SolveStatus::Optimal, SolveStatus::Infeasible, SolveStatus::Unbounded,
                    SolveStatus::Timeout, SolveStatus::Error}) {
        if (to_string(st) == s) return st;
    }
    throw IoError(fmt::format("unknown window status '{}'", s));
}

}  // namespace

// ---- public API ---------------------------------------------------------------

double parse_quantity(std::string_view text, Dimension dimension) {
    return parse_as(text, dimension, internal_unit(dimension));
}

std::string_view internal_unit(Dimension d) {
    switch (d) {
        case Dimension::Dimensionless: return "";
        case Dimension::Time: return "min";
        case Dimension::Power: return "MW";
        case Dimension::Energy: return "MWh";
        case Dimension::VolumeFlow: return "Sm3/s";
        case Dimension::Volume: return "Sm3";
        case Dimension::Pressure: return "MPa";
        case Dimension::Length: return "m";
        case Dimension::Temperature: return "K";
        case Dimension::MassFlow: return "kg/s";
        case Dimension::ApparentPower: return "MVA";
        case Dimension::HeatingValue: return "MJ/Sm3";
        case Dimension::Density: return "kg/Sm3";
    }
    return "";
}

namespace {
std::string join_diagnostics(const std::vector<Diagnostic>& diagnostics) {
    std::string out = fmt::format("{} validation error(s)", diagnostics.size());
    for (const auto& d : diagnostics) out += fmt::format("\n  {}: {}", d.element, d.message);
    return out;
}
}  // namespace

ValidationError::ValidationError(std::vector<Diagnostic> diagnostics)
    : ConfigError(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

ConfigDocument parse_config(std::string_view text, const fs::path& base_dir, bool load_profiles) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ConfigError(fmt::format("line {}, column {}: {}", e.mark.line + 1, e.mark.column + 1,
                                      e.msg));
    }
    if (!root || root.IsNull()) throw ConfigError("line 1, column 1: config is empty");
    if (!root.IsMap()) fail(root, "config must be a mapping at the top level");

    ConfigDocument doc;
    Section top(root, "config");
    doc.config = parse_simulation(top.require("simulation"));
    if (YAML::Node c = top.take("carriers")) doc.model.carriers = parse_carriers(c);
    if (YAML::Node nodes = top.take("nodes")) {
        std::size_t i = 0;
        for (const auto& n : sequence(nodes, "nodes")) doc.model.nodes.push_back(parse_node(n, i++));
    }
    if (YAML::Node edges = top.take("edges")) {
        std::size_t i = 0;
        for (const auto& n : sequence(edges, "edges")) doc.model.edges.push_back(parse_edge(n, i++));
    }
    const StepReader steps(doc.config.timestep_minutes);
    if (YAML::Node devices = top.take("devices")) {
        std::size_t i = 0;
        for (const auto& n : sequence(devices, "devices")) {
            doc.model.devices.push_back(parse_device(n, i++, steps));
        }
    }
    if (load_profiles && !doc.config.timeseries.empty()) {
        fs::path p(doc.config.timeseries);
        if (p.is_relative()) p = base_dir / p;
        doc.model.profiles = load_timeseries(p);
    }
    return doc;
}

ConfigDocument read_config(const fs::path& path, bool load_profiles) {
    const std::string text = read_text_file(path);
    try {
        return parse_config(text, path.parent_path(), load_profiles);
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

ConfigDocument load_config(const fs::path& path) {
    ConfigDocument doc = read_config(path);
    auto diagnostics = validate_model(doc.model);
    auto more = validate_config(doc.config, doc.model);
    diagnostics.insert(diagnostics.end(), more.begin(), more.end());
    if (!diagnostics.empty()) throw ValidationError(std::move(diagnostics));
    return doc;
}

std::string serialize_config(const ConfigDocument& doc) {
    const auto& c = doc.config;
    const auto& m = doc.model;
    YAML::Emitter e;
    e << YAML::BeginMap;

    e << YAML::Key << "simulation" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "timestep" << YAML::Value << q(c.timestep_minutes, "min");
    e << YAML::Key << "horizon" << YAML::Value << steps_text(c.horizon_steps);
    e << YAML::Key << "reoptimisation_interval" << YAML::Value << steps_text(c.reoptimisation_steps);
    e << YAML::Key << "nowcast_window" << YAML::Value << steps_text(c.nowcast_steps);
    if (c.steps) e << YAML::Key << "span" << YAML::Value << steps_text(*c.steps);
    e << YAML::Key << "reserve_min" << YAML::Value << q(c.reserve_min, "MW");
    if (c.emission_cap) e << YAML::Key << "emission_cap" << YAML::Value << q(*c.emission_cap, "kg/s");
    e << YAML::Key << "mip_gap" << YAML::Value << q(c.solver.mip_gap, "");
    e << YAML::Key << "time_limit" << YAML::Value << q(c.solver.time_limit_s, "s");
    e << YAML::Key << "seed" << YAML::Value << std::to_string(c.seed);
    e << YAML::Key << "elastic" << YAML::Value << (c.elastic ? "true" : "false");
    e << YAML::Key << "s_base" << YAML::Value << q(c.s_base, "MVA");
    if (!c.timeseries.empty()) e << YAML::Key << "timeseries" << YAML::Value << c.timeseries;
    if (!c.forecast_noise.empty()) {
        e << YAML::Key << "forecast_noise" << YAML::Value << YAML::BeginMap;
        for (const auto& [id, sigma] : c.forecast_noise) e << YAML::Key << id << YAML::Value << q(sigma, "");
        e << YAML::EndMap;
    }
    e << YAML::EndMap;

    if (!m.carriers.empty()) {
        e << YAML::Key << "carriers" << YAML::Value << YAML::BeginMap;
        for (const auto& [carrier, p] : m.carriers) {
            e << YAML::Key << std::string(to_string(carrier)) << YAML::Value << YAML::BeginMap;
            auto opt = [&](const char* key, const std::optional<double>& v, std::string_view u) {
                if (v) e << YAML::Key << key << YAML::Value << q(*v, u);
            };
            opt("calorific_value", p.calorific_value, "MJ/Sm3");
            opt("co2_content", p.co2_content, "kg/Sm3");
            opt("gravity", p.gravity, "");
            opt("compressibility", p.compressibility, "");
            opt("temperature", p.temperature, "K");
            opt("density", p.density, "kg/m3");
            opt("darcy_friction", p.darcy_friction, "");
            e << YAML::EndMap;
        }
        e << YAML::EndMap;
    }

    e << YAML::Key << "nodes" << YAML::Value << YAML::BeginSeq;
    for (const auto& n : m.nodes) {
        e << YAML::BeginMap;
        e << YAML::Key << "id" << YAML::Value << n.id;
        e << YAML::Key << "elevation" << YAML::Value << q(n.elevation, "m");
        e << YAML::Key << "angle_reference" << YAML::Value << (n.angle_reference ? "true" : "false");
        if (!n.pressures.empty()) {
            e << YAML::Key << "pressures" << YAML::Value << YAML::BeginMap;
            for (const auto& [carrier, p] : n.pressures) {
                e << YAML::Key << std::string(to_string(carrier)) << YAML::Value << YAML::BeginMap;
                e << YAML::Key << "nominal" << YAML::Value << q(p.nominal, "MPa");
                if (p.nominal_out) e << YAML::Key << "nominal_out" << YAML::Value << q(*p.nominal_out, "MPa");
                if (p.max_deviation) {
                    e << YAML::Key << "max_deviation" << YAML::Value << q(*p.max_deviation, "");
                }
                e << YAML::EndMap;
            }
            e << YAML::EndMap;
        }
        e << YAML::EndMap;
    }
    e << YAML::EndSeq;

    e << YAML::Key << "edges" << YAML::Value << YAML::BeginSeq;
    for (const auto& ed : m.edges) {
        const auto unit = flow_unit(ed.carrier);
        e << YAML::BeginMap;
        e << YAML::Key << "id" << YAML::Value << ed.id;
        e << YAML::Key << "carrier" << YAML::Value << std::string(to_string(ed.carrier));
        e << YAML::Key << "from" << YAML::Value << ed.from;
        e << YAML::Key << "to" << YAML::Value << ed.to;
        if (ed.max_flow) e << YAML::Key << "max_flow" << YAML::Value << q(*ed.max_flow, unit);
        e << YAML::Key << "bidirectional" << YAML::Value << (ed.bidirectional ? "true" : "false");
        e << YAML::Key << "model" << YAML::Value << std::string(to_string(ed.model));
        if (ed.reactance) e << YAML::Key << "reactance" << YAML::Value << q(*ed.reactance, "");
        if (!ed.losses.empty()) {
            e << YAML::Key << "losses" << YAML::Value << YAML::BeginSeq;
            for (const auto& lp : ed.losses) {
                e << YAML::Flow << YAML::BeginMap;
                e << YAML::Key << "flow" << YAML::Value << q(lp.flow, unit);
                e << YAML::Key << "loss" << YAML::Value << q(lp.loss, unit);
                e << YAML::EndMap;
            }
            e << YAML::EndSeq;
        }
        if (ed.diameter_mm) e << YAML::Key << "diameter" << YAML::Value << q(*ed.diameter_mm, "mm");
        if (ed.length_km) e << YAML::Key << "length" << YAML::Value << q(*ed.length_km, "km");
        if (ed.base_temperature) {
            e << YAML::Key << "base_temperature" << YAML::Value << q(*ed.base_temperature, "K");
        }
        if (ed.base_pressure) e << YAML::Key << "base_pressure" << YAML::Value << q(*ed.base_pressure, "MPa");
        e << YAML::EndMap;
    }
    e << YAML::EndSeq;

    e << YAML::Key << "devices" << YAML::Value << YAML::BeginSeq;
    for (const auto& d : m.devices) emit_device(e, d);
    e << YAML::EndSeq;

    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

TimeSeriesSet parse_timeseries(std::string_view text, std::string_view source) {
    const auto lines = split_lines(text);
    if (lines.empty() || trim(lines.front()).empty()) {
        throw ConfigError(fmt::format("{}: empty time-series file", source));
    }
    const auto header = split_cells(lines.front());
    if (header.front() != "step") {
        throw ConfigError(fmt::format("{}: first column must be 'step'", source));
    }
    struct Column {
        std::size_t profile;
        bool nowcast;
    };
    std::vector<Column> columns;
    std::vector<std::string> ids;
    std::map<std::string, std::size_t> index;
    std::set<std::string> seen;
    for (std::size_t i = 1; i < header.size(); ++i) {
        const std::string name(header[i]);
        if (!seen.insert(name).second) {
            throw ConfigError(fmt::format("{}: duplicate column '{}'", source, name));
        }
        const auto dot = name.rfind('.');
        const std::string suffix = dot == std::string::npos ? "" : name.substr(dot + 1);
        if (dot == 0 || (suffix != "forecast" && suffix != "nowcast")) {
            throw ConfigError(fmt::format(
                "{}: column '{}' must be named <profile>.forecast or <profile>.nowcast", source,
                name));
        }
        const std::string id = name.substr(0, dot);
        auto [it, added] = index.emplace(id, ids.size());
        if (added) ids.push_back(id);
        columns.push_back({it->second, suffix == "nowcast"});
    }

    TimeSeriesSet set;
    for (const auto& id : ids) set.profiles.push_back(Profile{id, {}, std::nullopt});
    for (const auto& c : columns) {
        if (c.nowcast) set.profiles[c.profile].nowcast.emplace();
    }
    for (const auto& p : set.profiles) {
        if (std::none_of(columns.begin(), columns.end(), [&](const Column& c) {
                return !c.nowcast && ids[c.profile] == p.id;
            })) {
            throw ConfigError(fmt::format("{}: profile '{}' has a nowcast but no forecast column",
                                          source, p.id));
        }
    }

    for (std::size_t row = 1; row < lines.size(); ++row) {
        const auto cells = split_cells(lines[row]);
        const std::size_t line_no = row + 1;
        if (cells.size() != header.size()) {
            throw ConfigError(fmt::format("{}: row {} has {} cells, expected {}", source, line_no,
                                          cells.size(), header.size()));
        }
        const auto step = parse_double(cells[0]);
        if (!step || *step != static_cast<double>(row - 1)) {
            throw ConfigError(fmt::format("{}: row {}: step must be {}", source, line_no, row - 1));
        }
        for (std::size_t i = 1; i < cells.size(); ++i) {
            const auto v = parse_double(cells[i]);
            if (!v) {
                throw ConfigError(fmt::format("{}: row {}, column '{}': '{}' is not a number",
                                              source, line_no, header[i], cells[i]));
            }
            if (*v < 0.0) {
                throw ConfigError(fmt::format("{}: row {}, column '{}': negative value {}", source,
                                              line_no, header[i], cells[i]));
            }
            auto& p = set.profiles[columns[i - 1].profile];
            (columns[i - 1].nowcast ? *p.nowcast : p.forecast).push_back(*v);
        }
    }
    return set;
}

TimeSeriesSet load_timeseries(const fs::path& path) {
    return parse_timeseries(read_text_file(path), path.string());
}

std::string format_timeseries(const TimeSeriesSet& series) {
    std::string out = "step";
    for (const auto& p : series.profiles) {
        out += "," + p.id + ".forecast";
        if (p.nowcast) out += "," + p.id + ".nowcast";
    }
    out += "\n";
    const std::size_t n = series.profiles.empty() ? 0 : series.profiles.front().forecast.size();
    for (std::size_t t = 0; t < n; ++t) {
        out += std::to_string(t);
        for (const auto& p : series.profiles) {
            out += "," + fmt_double(t < p.forecast.size() ? p.forecast[t] : 0.0);
            if (p.nowcast) out += "," + fmt_double(t < p.nowcast->size() ? (*p.nowcast)[t] : 0.0);
        }
        out += "\n";
    }
    return out;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw IoError("SHA-256 computation failed");
    }
    std::string hex;
    for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError(fmt::format("cannot read '{}'", path.string()));
    return buffer.str();
}

void write_text_file(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
}

ResultBundle make_bundle(const SimulationResult& result, const ConfigDocument& document,
                         std::string config_text, std::string_view solver_name) {
    ResultBundle b;
    b.metadata.version = std::string(kVersion);
    b.metadata.config_sha256 = sha256_hex(config_text);
    b.metadata.timeseries_sha256 = sha256_hex(format_timeseries(document.model.profiles));
    b.metadata.seed = document.config.seed;
    b.metadata.steps = result.steps;
    b.metadata.timestep_minutes = result.timestep_minutes;
    b.metadata.solver = std::string(solver_name);
    b.config_text = std::move(config_text);
    b.result = result;
    b.kpis = compute_kpis(result, document.model);
    return b;
}

std::string format_series_csv(const SimulationResult& r) {
    std::string out = "step";
    for (const auto& [name, _] : r.series) out += "," + name;
    out += "\n";
    for (int t = 0; t < r.steps; ++t) {
        out += std::to_string(t);
        const auto ut = static_cast<std::size_t>(t);
        for (const auto& [_, values] : r.series) {
            out += "," + fmt_double(ut < values.size() ? values[ut] : 0.0);
        }
        out += "\n";
    }
    return out;
}

std::string format_kpi_json(const KpiSummary& k) {
    json j;
    j["steps"] = k.steps;
    j["timestep_minutes"] = k.timestep_minutes;
    j["emission_total_kg"] = k.emission_total_kg;
    j["emission_mean_kg_per_s"] = k.emission_mean_kg_per_s;
    j["gas_burned_sm3"] = k.gas_burned_sm3;
    j["gt_running_hours"] = k.gt_running_hours;
    j["gt_prep_hours"] = k.gt_prep_hours;
    j["gt_starts"] = k.gt_starts;
    j["gt_stops"] = k.gt_stops;
    j["min_reserve_mw"] = k.min_reserve_mw;
    j["elastic_active"] = k.elastic_active;
    j["elastic_supply_mwh"] = k.elastic_supply_mwh;
    j["elastic_reserve_mwh"] = k.elastic_reserve_mwh;
    json gts = json::array();
    for (const auto& u : k.gas_turbines) {
        gts.push_back({{"device", u.device},
                       {"running_hours", u.running_hours},
                       {"prep_hours", u.prep_hours},
                       {"starts", u.starts},
                       {"stops", u.stops}});
    }
    j["gas_turbines"] = gts;
    return j.dump(2) + "\n";
}

KpiSummary parse_kpi_json(std::string_view text) {
    try {
        const json j = json::parse(text);
        KpiSummary k;
        k.steps = j.at("steps").get<int>();
        k.timestep_minutes = j.at("timestep_minutes").get<double>();
        k.emission_total_kg = j.at("emission_total_kg").get<double>();
        k.emission_mean_kg_per_s = j.at("emission_mean_kg_per_s").get<double>();
        k.gas_burned_sm3 = j.at("gas_burned_sm3").get<double>();
        k.gt_running_hours = j.at("gt_running_hours").get<double>();
        k.gt_prep_hours = j.at("gt_prep_hours").get<double>();
        k.gt_starts = j.at("gt_starts").get<int>();
        k.gt_stops = j.at("gt_stops").get<int>();
        k.min_reserve_mw = j.at("min_reserve_mw").get<double>();
        k.elastic_active = j.at("elastic_active").get<bool>();
        k.elastic_supply_mwh = j.at("elastic_supply_mwh").get<double>();
        k.elastic_reserve_mwh = j.at("elastic_reserve_mwh").get<double>();
        for (const auto& g : j.at("gas_turbines")) {
            DeviceUsage u;
            u.device = g.at("device").get<std::string>();
            u.running_hours = g.at("running_hours").get<double>();
            u.prep_hours = g.at("prep_hours").get<double>();
            u.starts = g.at("starts").get<int>();
            u.stops = g.at("stops").get<int>();
            k.gas_turbines.push_back(u);
        }
        return k;
    } catch (const json::exception& e) {
        throw IoError(fmt::format("malformed KPI summary: {}", e.what()));
    }
}

void write_results(const ResultBundle& b, const fs::path& dir, bool force) {
    std::error_code ec;
    if (fs::exists(dir, ec)) {
        if (!fs::is_directory(dir, ec)) {
            throw IoError(fmt::format("'{}' exists and is not a directory", dir.string()));
        }
        if (!fs::is_empty(dir, ec) && !force) {
            throw ConfigError(fmt::format(
                "output directory '{}' is not empty (use --force to overwrite)", dir.string()));
        }
    } else if (!fs::create_directories(dir, ec) || ec) {
        throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
    }

    write_text_file(dir / "series.csv", format_series_csv(b.result));

    std::string windows = "index,t0,committed,status,objective,accounted_objective,mip_gap,max_residual\n";
    for (const auto& w : b.result.windows) windows += window_row(w);
    write_text_file(dir / "windows.csv", windows);

    write_text_file(dir / "kpi.json", format_kpi_json(b.kpis));

    json meta;
    meta["version"] = b.metadata.version;
    meta["config_sha256"] = b.metadata.config_sha256;
    meta["timeseries_sha256"] = b.metadata.timeseries_sha256;
    meta["seed"] = b.metadata.seed;
    meta["steps"] = b.metadata.steps;
    meta["timestep_minutes"] = b.metadata.timestep_minutes;
    meta["solver"] = b.metadata.solver;
    write_text_file(dir / "metadata.json", meta.dump(2) + "\n");

    write_text_file(dir / "config.yaml", b.config_text);
}

ResultBundle read_results(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError(fmt::format("'{}' is not a result bundle", dir.string()));
    ResultBundle b;
    try {
        const json meta = json::parse(read_text_file(dir / "metadata.json"));
        b.metadata.version = meta.at("version").get<std::string>();
        b.metadata.config_sha256 = meta.at("config_sha256").get<std::string>();
        b.metadata.timeseries_sha256 = meta.at("timeseries_sha256").get<std::string>();
        b.metadata.seed = meta.at("seed").get<std::uint64_t>();
        b.metadata.steps = meta.at("steps").get<int>();
        b.metadata.timestep_minutes = meta.at("timestep_minutes").get<double>();
        b.metadata.solver = meta.at("solver").get<std::string>();
    } catch (const json::exception& e) {
        throw IoError(fmt::format("malformed metadata in '{}': {}", dir.string(), e.what()));
    }
    b.config_text = read_text_file(dir / "config.yaml");
    b.kpis = parse_kpi_json(read_text_file(dir / "kpi.json"));
    b.result.steps = b.metadata.steps;
    b.result.timestep_minutes = b.metadata.timestep_minutes;

    const std::string series = read_text_file(dir / "series.csv");
    const auto lines = split_lines(series);
    if (lines.empty()) throw IoError("series.csv is empty");
    const auto header = split_cells(lines.front());
    if (static_cast<int>(lines.size()) - 1 != b.metadata.steps) {
        throw IoError(fmt::format("series.csv has {} rows, metadata says {} steps",
                                  lines.size() - 1, b.metadata.steps));
    }
    std::vector<std::vector<double>*> columns;
    for (std::size_t i = 1; i < header.size(); ++i) {
        columns.push_back(&b.result.series[std::string(header[i])]);
    }
    for (std::size_t row = 1; row < lines.size(); ++row) {
        const auto cells = split_cells(lines[row]);
        if (cells.size() != header.size()) {
            throw IoError(fmt::format("series.csv row {} is ragged", row + 1));
        }
        for (std::size_t i = 1; i < cells.size(); ++i) {
            const auto v = parse_double(cells[i]);
            if (!v) throw IoError(fmt::format("series.csv row {}: bad value '{}'", row + 1, cells[i]));
            columns[i - 1]->push_back(*v);
        }
    }

    const std::string windows_text = read_text_file(dir / "windows.csv");
    const auto window_lines = split_lines(windows_text);
    for (std::size_t row = 1; row < window_lines.size(); ++row) {
        const auto cells = split_cells(window_lines[row]);
        if (cells.size() != 8) throw IoError(fmt::format("windows.csv row {} is ragged", row + 1));
        std::vector<double> v;
        for (std::size_t i : {0u, 1u, 2u, 4u, 5u, 6u, 7u}) {
            const auto x = parse_double(cells[i]);
            if (!x) throw IoError(fmt::format("windows.csv row {}: bad value '{}'", row + 1, cells[i]));
            v.push_back(*x);
        }
        WindowReport w;
        w.index = static_cast<int>(v[0]);
        w.t0 = static_cast<int>(v[1]);
        w.committed = static_cast<int>(v[2]);
        w.status = status_from_string(cells[3]);
        w.objective = v[3];
        w.accounted_objective = v[4];
        w.mip_gap = v[5];
        w.max_residual = v[6];
        b.result.windows.push_back(w);
    }
    return b;
}

ConfigDocument bundle_document(const ResultBundle& bundle) {
    return parse_config(bundle.config_text, {}, false);
}

}  // namespace platopt
