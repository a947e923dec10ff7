#include "platopt/devices.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "platopt/errors.hpp"
#include "platopt/physics.hpp"

namespace platopt {

namespace {

std::string row_name(const DeviceVariables& v, std::string_view what, int k) {
    return fmt::format("dev.{}.{}.t{}", v.spec->id, what, v.t0 + k);
}

std::string var_name(const DeviceSpec& d, std::string_view what, int t) {
    return fmt::format("dev.{}.{}.t{}", d.id, what, t);
}

bool has_explicit_flow(DeviceType type) {
    return type == DeviceType::Well || type == DeviceType::Separator;
}

LinearExpr pressure_or_nominal(const std::map<Carrier, std::vector<VarId>>& vars, Carrier c,
                               int k, double nominal) {
    auto it = vars.find(c);
    if (it != vars.end() && static_cast<std::size_t>(k) < it->second.size() &&
        it->second[static_cast<std::size_t>(k)].valid()) {
        return it->second[static_cast<std::size_t>(k)];
    }
    return nominal;
}

std::optional<VarId> pressure_var(const std::map<Carrier, std::vector<VarId>>& vars, Carrier c,
                                  int k) {
    auto it = vars.find(c);
    if (it == vars.end() || static_cast<std::size_t>(k) >= it->second.size()) return std::nullopt;
    const VarId v = it->second[static_cast<std::size_t>(k)];
    if (!v.valid()) return std::nullopt;
    return v;
}

double calorific(const DeviceContext& ctx, Carrier c, const DeviceSpec& spec) {
    const auto& props = ctx.model ? ctx.model->carrier(c) : CarrierProperties{};
    if (!props.calorific_value || *props.calorific_value <= 0.0) {
        throw ConfigError("device " + spec.id + ": missing calorific value for " +
                          std::string(to_string(c)));
    }
    return *props.calorific_value;
}

}  // namespace

double initial_storage_level(const DeviceSpec& d) {
    if (const auto* b = d.maybe<BatteryParams>()) {
        return b->initial_level.value_or(0.5 * b->energy_max);
    }
    if (const auto* h = d.maybe<HydrogenStorageParams>()) {
        return h->initial_level.value_or(0.5 * h->energy_max);
    }
    return 0.0;
}

DeviceHistory initial_history(const DeviceSpec& d) {
    DeviceHistory h;
    if (d.start_stop) {
        h.on = d.initial_on.value_or(true) ? 1 : 0;
        h.starts.assign(static_cast<std::size_t>(d.start_stop->delay_steps), 0);
    }
    h.flow = d.initial_flow;
    if (is_storage(d.type())) h.level = initial_storage_level(d);
    return h;
}

double battery_big_m(const DeviceSpec& spec) {
    const auto& p = spec.as<BatteryParams>();
    if (p.big_m) return *p.big_m;
    return 2.0 * spec.flow_max + p.energy_max / p.reserve_time;
}

double storage_target(const DeviceSpec& spec, const DeviceHistory& history) {
    if (const auto* h = spec.maybe<HydrogenStorageParams>(); h && h->target) return *h->target;
    return history.level.value_or(initial_storage_level(spec));
}

// ------------------------------------------------------------------ variables

LinearExpr DeviceVariables::in_flow(Carrier c, int k) const {
    auto it = in.find(c);
    if (it == in.end()) return 0.0;
    return it->second.at(static_cast<std::size_t>(k));
}

LinearExpr DeviceVariables::out_flow(Carrier c, int k) const {
    auto it = out.find(c);
    if (it == out.end()) return 0.0;
    return it->second.at(static_cast<std::size_t>(k));
}

LinearExpr DeviceVariables::f(int k) const {
    if (k < 0) {
        if (!history.flow) throw AssemblyError("device " + spec->id + ": no flow history");
        return *history.flow;
    }
    const auto uk = static_cast<std::size_t>(k);
    switch (spec->type()) {
        case DeviceType::Well:
        case DeviceType::Separator: return flow[uk];
        case DeviceType::Compressor: return out_flow(Carrier::Gas, k);
        case DeviceType::Pump: return in_flow(spec->as<PumpParams>().carrier, k);
        case DeviceType::GasTurbine: return out_flow(Carrier::Electricity, k);
        case DeviceType::Heater: return in_flow(Carrier::Electricity, k);
        case DeviceType::Source: return out_flow(spec->as<SourceParams>().carrier, k);
        case DeviceType::Sink: return in_flow(spec->as<SinkParams>().carrier, k);
        case DeviceType::Battery: return out_flow(Carrier::Electricity, k);
        case DeviceType::HydrogenStorage: return out_flow(Carrier::Hydrogen, k);
        case DeviceType::Electrolyser: return in_flow(Carrier::Electricity, k);
        case DeviceType::FuelCell: return out_flow(Carrier::Electricity, k);
    }
    return 0.0;
}

LinearExpr DeviceVariables::on(int k) const {
    if (!has_start_stop()) return 1.0;
    if (k < 0) return k == -1 ? static_cast<double>(history.on) : 0.0;
    return y_on[static_cast<std::size_t>(k)];
}

LinearExpr DeviceVariables::prep(int k) const {
    if (y_prep.empty() || k < 0) return 0.0;
    return y_prep[static_cast<std::size_t>(k)];
}

LinearExpr DeviceVariables::start(int k) const {
    if (!has_start_stop()) return 0.0;
    if (k < 0) {
        const auto j = static_cast<std::size_t>(-k - 1);
        return j < history.starts.size() ? static_cast<double>(history.starts[j]) : 0.0;
    }
    return y_start[static_cast<std::size_t>(k)];
}

LinearExpr DeviceVariables::storage_level(int k) const {
    if (k < 0) return history.level.value_or(initial_storage_level(*spec));
    return level.at(static_cast<std::size_t>(k));
}

DeviceVariables create_device_variables(MilpModel& milp, const DeviceSpec& d,
                                        const DeviceHistory& history, int t0, int horizon) {
    DeviceVariables v;
    v.spec = &d;
    v.history = history;
    v.t0 = t0;
    v.horizon = horizon;

    if (d.start_stop) {
        const int ts = d.start_stop->delay_steps;
        if (static_cast<int>(history.starts.size()) < ts) {
            throw AssemblyError("device " + d.id + ": start history shorter than the start delay");
        }
        if (history.on != 0 && history.on != 1) {
            throw AssemblyError("device " + d.id + ": on-state history must be 0 or 1");
        }
        int pending = 0;
        for (int j = 0; j < ts; ++j) pending += history.starts[static_cast<std::size_t>(j)];
        if (pending > 1) {
            throw AssemblyError("device " + d.id + ": overlapping starts in history");
        }
        if (horizon < ts + 1) {
            throw AssemblyError("device " + d.id + ": window shorter than start delay + 1");
        }
    }

    const DeviceType type = d.type();
    for (Carrier c : device_inputs(d)) {
        auto& list = v.in[c];
        for (int k = 0; k < horizon; ++k) {
            double ub = kInf;
            if (type == DeviceType::Battery) {
                ub = d.as<BatteryParams>().charge_max.value_or(d.flow_max);
            }
            list.push_back(milp.add_continuous(
                var_name(d, fmt::format("in.{}", to_string(c)), t0 + k), 0.0, ub));
        }
    }
    for (Carrier c : device_outputs(d)) {
        auto& list = v.out[c];
        for (int k = 0; k < horizon; ++k) {
            list.push_back(milp.add_continuous(
                var_name(d, fmt::format("out.{}", to_string(c)), t0 + k)));
        }
    }
    if (has_explicit_flow(type)) {
        for (int k = 0; k < horizon; ++k) {
            v.flow.push_back(milp.add_continuous(var_name(d, "flow", t0 + k)));
        }
    }
    if (d.start_stop) {
        for (int k = 0; k < horizon; ++k) {
            v.y_on.push_back(milp.add_binary(var_name(d, "on", t0 + k)));
            v.y_start.push_back(milp.add_binary(var_name(d, "start", t0 + k)));
            v.y_stop.push_back(milp.add_binary(var_name(d, "stop", t0 + k)));
            if (d.start_stop->delay_steps > 0) {
                v.y_prep.push_back(milp.add_binary(var_name(d, "prep", t0 + k)));
            }
        }
    }
    if (is_storage(type)) {
        double e_min = 0.0;
        double e_max = 0.0;
        if (const auto* b = d.maybe<BatteryParams>()) {
            e_min = b->energy_min;
            e_max = b->energy_max;
        } else {
            const auto& h = d.as<HydrogenStorageParams>();
            e_min = h.energy_min;
            e_max = h.energy_max;
        }
        for (int k = 0; k < horizon; ++k) {
            v.level.push_back(milp.add_continuous(var_name(d, "level", t0 + k), e_min, e_max));
        }
        v.deviation = milp.add_continuous(fmt::format("dev.{}.deviation.w{}", d.id, t0));
    }
    if (type == DeviceType::Battery) {
        for (int k = 0; k < horizon; ++k) {
            v.p_max.push_back(milp.add_continuous(var_name(d, "pmax", t0 + k)));
            v.y_storage.push_back(milp.add_binary(var_name(d, "ystorage", t0 + k)));
        }
    }
    return v;
}

// ------------------------------------------------------------------- generic

ConstraintSet generic_device_constraints(const DeviceSpec& d, const DeviceVariables& v, int k) {
    ConstraintSet out;
    const LinearExpr f = v.f(k);
    const double pr = v.pr(k);
    out.push_back(less_equal(row_name(v, "flow_max", k), f, d.flow_max * pr * v.on(k)));
    if (d.flow_min * pr > 0.0) {
        out.push_back(greater_equal(row_name(v, "flow_min", k), f, d.flow_min * pr * v.on(k)));
    }

    const bool have_previous = k > 0 || v.history.flow.has_value();
    if ((d.ramp_up || d.ramp_down) && d.flow_max <= 0.0) {
        throw ConfigError("device " + d.id + ": ramp limits need flow_max > 0");
    }
    if (have_previous && d.ramp_up) {
        out.push_back(less_equal(row_name(v, "ramp_up", k), f - v.f(k - 1),
                                 *d.ramp_up * d.flow_max));
    }
    if (have_previous && d.ramp_down) {
        out.push_back(greater_equal(row_name(v, "ramp_down", k), f - v.f(k - 1),
                                    -*d.ramp_down * d.flow_max));
    }

    if (v.has_start_stop()) {
        const int ts = d.start_stop->delay_steps;
        const auto uk = static_cast<std::size_t>(k);
        out.push_back(equal(row_name(v, "startstop", k),
                            v.on(k) - v.on(k - 1),
                            v.start(k - ts) - LinearExpr(v.y_stop[uk])));
        if (ts > 0) {
            LinearExpr recent;
            for (int tau = 0; tau < ts; ++tau) recent += v.start(k - tau);
            out.push_back(equal(row_name(v, "prep", k), v.y_prep[uk], recent));
        }
        // a start already under way cannot be cancelled when it lands
        if (k - ts < 0) {
            const LinearExpr landing = v.start(k - ts);
            if (landing.is_constant() && landing.constant() > 0.5) {
                out.push_back(less_equal(row_name(v, "start_landing", k), v.y_stop[uk],
                                         v.on(k - 1)));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------- type-specific

ConstraintSet well_constraints(const DeviceSpec& d, const DeviceVariables& v, int k) {
    const auto& p = d.as<WellParams>();
    const auto split = physics::well_split(p.gas_oil_ratio, p.water_cut);
    const LinearExpr f = v.f(k);
    const LinearExpr gas_in = v.in_flow(Carrier::Gas, k);
    const LinearExpr gas_out = v.out_flow(Carrier::Gas, k);
    const LinearExpr oil = v.out_flow(Carrier::Oil, k);
    const LinearExpr water = v.out_flow(Carrier::Water, k);
    ConstraintSet out;
    out.push_back(equal(row_name(v, "wellstream", k), f, gas_out - gas_in + oil + water));
    out.push_back(equal(row_name(v, "water_split", k), water, split.water * f));
    out.push_back(equal(row_name(v, "oil_split", k), oil, split.oil * f));
    out.push_back(equal(row_name(v, "gas_split", k), gas_out - gas_in, split.gas * f));
    out.push_back(equal(row_name(v, "gas_lift", k), gas_in, p.injection_ratio * oil));
    if (p.separator_pressure) {
        for (Carrier c : {Carrier::Gas, Carrier::Oil, Carrier::Water}) {
            if (auto pv = pressure_var(v.p_out, c, k)) {
                out.push_back(equal(row_name(v, fmt::format("p_out_{}", to_string(c)), k), *pv,
                                    *p.separator_pressure));
            }
        }
    }
    if (p.injection_pressure) {
        if (auto pv = pressure_var(v.p_in, Carrier::Gas, k)) {
            out.push_back(equal(row_name(v, "p_in_gas", k), *pv, *p.injection_pressure));
        }
    }
    return out;
}

ConstraintSet separator_constraints(const DeviceSpec& d, const DeviceVariables& v, int k) {
    const auto& p = d.as<SeparatorParams>();
    ConstraintSet out;
    LinearExpr total;
    for (Carrier c : {Carrier::Oil, Carrier::Gas, Carrier::Water}) {
        out.push_back(equal(row_name(v, fmt::format("pass_{}", to_string(c)), k),
                            v.out_flow(c, k), v.in_flow(c, k)));
        total += v.in_flow(c, k);
        auto nominal = p.outlet_pressure.find(c);
        if (nominal == p.outlet_pressure.end()) continue;
        if (auto pv = pressure_var(v.p_out, c, k)) {
            out.push_back(equal(row_name(v, fmt::format("p_out_{}", to_string(c)), k), *pv,
                                nominal->second));
        }
    }
    out.push_back(equal(row_name(v, "throughput", k), v.f(k), total));
    out.push_back(equal(row_name(v, "heat_demand", k), v.in_flow(Carrier::Heat, k),
                        p.heat_factor * total));
    out.push_back(equal(row_name(v, "el_demand", k), v.in_flow(Carrier::Electricity, k),
                        p.el_factor * total));
    return out;
}

ConstraintSet compressor_constraints(const DeviceSpec& d, const DeviceVariables& v,
                                     const DeviceContext& ctx, int k) {
    const auto& p = d.as<CompressorParams>();
    if (!ctx.model) throw AssemblyError("compressor constraints need the system model");
    const auto nominal = nominal_pressures(*ctx.model, d);
    if (!nominal || !p.nominal_flow) {
        throw ConfigError("device " + d.id + ": compressor needs nominal flow and pressures");
    }
    const auto coeff = physics::compressor_coefficients(p);
    const auto lin = physics::linearize_compressor(
        {*p.nominal_flow, nominal->first, nominal->second}, coeff);
    const LinearExpr q = v.out_flow(Carrier::Gas, k);
    const LinearExpr power =
        lin.per_flow * q +
        lin.per_inlet_pressure * pressure_or_nominal(v.p_in, Carrier::Gas, k, nominal->first) +
        lin.per_outlet_pressure * pressure_or_nominal(v.p_out, Carrier::Gas, k, nominal->second);
    ConstraintSet out;
    if (p.drive == CompressorDrive::Electric) {
        out.push_back(equal(row_name(v, "pass_gas", k), q, v.in_flow(Carrier::Gas, k)));
        out.push_back(equal(row_name(v, "power", k), v.in_flow(Carrier::Electricity, k), power));
    } else {
        const double c_gas = calorific(ctx, Carrier::Gas, d);
        out.push_back(equal(row_name(v, "fuel", k), q,
                            v.in_flow(Carrier::Gas, k) - (1.0 / c_gas) * power));
    }
    return out;
}

ConstraintSet pump_constraints(const DeviceSpec& d, const DeviceVariables& v,
                               const DeviceContext& ctx, int k) {
    const auto& p = d.as<PumpParams>();
    if (!ctx.model) throw AssemblyError("pump constraints need the system model");
    const auto nominal = nominal_pressures(*ctx.model, d);
    if (!nominal) throw ConfigError("device " + d.id + ": pump needs nominal pressures");
    const LinearExpr q = v.in_flow(p.carrier, k);
    ConstraintSet out;
    out.push_back(equal(row_name(v, "pass", k), v.out_flow(p.carrier, k), q));
    out.push_back(equal(row_name(v, "power", k), v.in_flow(Carrier::Electricity, k),
                        (nominal->second - nominal->first) / p.efficiency * q));
    return out;
}

ConstraintSet gas_turbine_constraints(const DeviceSpec& d, const DeviceVariables& v,
                                      const DeviceContext& ctx, int k) {
    const auto& p = d.as<GasTurbineParams>();
    if (d.flow_max <= 0.0) throw ConfigError("device " + d.id + ": gas turbine needs flow_max > 0");
    const double c_gas = calorific(ctx, Carrier::Gas, d);
    const LinearExpr gas = v.in_flow(Carrier::Gas, k);
    const LinearExpr el = v.out_flow(Carrier::Electricity, k);
    ConstraintSet out;
    // divided through by f_max for scaling, as in the fuel curve definition
    out.push_back(equal(row_name(v, "fuel", k), (c_gas / d.flow_max) * gas,
                        (p.fuel_a / d.flow_max) * el + p.fuel_b * (v.on(k) + v.prep(k))));
    out.push_back(equal(row_name(v, "heat", k), v.out_flow(Carrier::Heat, k),
                        p.heat_efficiency * (c_gas * gas - el)));
    return out;
}

ConstraintSet heater_constraints(const DeviceSpec& d, const DeviceVariables& v, int k) {
    ConstraintSet out;
    out.push_back(equal(row_name(v, "heat", k), v.out_flow(Carrier::Heat, k),
                        d.as<HeaterParams>().efficiency * v.in_flow(Carrier::Electricity, k)));
    return out;
}

ConstraintSet source_sink_constraints(const DeviceSpec& d, const DeviceVariables& v, int k) {
    // the flow alias is the single in- or out-flow; check it exists
    const Carrier c = d.type() == DeviceType::Source ? d.as<SourceParams>().carrier
                                                     : d.as<SinkParams>().carrier;
    const auto& flows = d.type() == DeviceType::Source ? v.out : v.in;
    if (flows.size() != 1 || !flows.contains(c)) {
        throw ConfigError("device " + d.id + ": carrier does not match the declared type");
    }
    (void)k;
    return {};
}

ConstraintSet battery_constraints(const DeviceSpec& d, const DeviceVariables& v,
                                  const DeviceContext& ctx, int k) {
    const auto& p = d.as<BatteryParams>();
    const double m = battery_big_m(d);
    if (m <= d.flow_max) throw ConfigError("device " + d.id + ": big-M must exceed flow_max");
    const auto uk = static_cast<std::size_t>(k);
    const LinearExpr charge = v.in_flow(Carrier::Electricity, k);
    const LinearExpr discharge = v.out_flow(Carrier::Electricity, k);
    const LinearExpr level = v.storage_level(k);
    ConstraintSet out;
    out.push_back(equal(row_name(v, "energy", k),
                        ctx.dt_hours * (p.efficiency * charge - (1.0 / p.efficiency) * discharge),
                        level - v.storage_level(k - 1)));
    out.push_back(less_equal(row_name(v, "discharge_max", k), discharge, d.flow_max));
    out.push_back(less_equal(row_name(v, "charge_max", k), charge,
                             p.charge_max.value_or(d.flow_max)));
    // p_max = min(f_max, E / t_res); y_storage = 1 selects the energy branch
    const LinearExpr pmax = v.p_max[uk];
    const LinearExpr y = v.y_storage[uk];
    const LinearExpr energy_power = (1.0 / p.reserve_time) * level;
    out.push_back(greater_equal(row_name(v, "pmax_cap_lo", k), pmax, d.flow_max - m * y));
    out.push_back(less_equal(row_name(v, "pmax_cap_hi", k), pmax, d.flow_max));
    out.push_back(greater_equal(row_name(v, "pmax_energy_lo", k), pmax,
                                energy_power - m * (1.0 - y)));
    out.push_back(less_equal(row_name(v, "pmax_energy_hi", k), pmax, energy_power));
    if (k == v.horizon - 1) {
        out.push_back(greater_equal(row_name(v, "deviation", k), v.deviation,
                                    storage_target(d, v.history) - level));
    }
    return out;
}

ConstraintSet hydrogen_storage_constraints(const DeviceSpec& d, const DeviceVariables& v,
                                           const DeviceContext& ctx, int k, bool is_last_step,
                                           double target) {
    (void)d;
    const LinearExpr level = v.storage_level(k);
    ConstraintSet out;
    out.push_back(equal(row_name(v, "mass", k),
                        ctx.dt_seconds * (v.in_flow(Carrier::Hydrogen, k) -
                                          v.out_flow(Carrier::Hydrogen, k)),
                        level - v.storage_level(k - 1)));
    if (is_last_step) {
        out.push_back(greater_equal(row_name(v, "deviation", k), v.deviation, target - level));
    }
    return out;
}

ConstraintSet electrolyser_constraints(const DeviceSpec& d, const DeviceVariables& v,
                                       const DeviceContext& ctx, int k) {
    const auto& p = d.as<ElectrolyserParams>();
    const double c_h = calorific(ctx, Carrier::Hydrogen, d);
    const LinearExpr el = v.in_flow(Carrier::Electricity, k);
    ConstraintSet out;
    out.push_back(equal(row_name(v, "hydrogen", k), c_h * v.out_flow(Carrier::Hydrogen, k),
                        p.efficiency * el));
    out.push_back(equal(row_name(v, "heat", k), v.out_flow(Carrier::Heat, k),
                        (1.0 - p.efficiency) * p.heat_efficiency * el));
    return out;
}

ConstraintSet fuel_cell_constraints(const DeviceSpec& d, const DeviceVariables& v,
                                    const DeviceContext& ctx, int k) {
    const auto& p = d.as<FuelCellParams>();
    const double c_h = calorific(ctx, Carrier::Hydrogen, d);
    const LinearExpr h2 = v.in_flow(Carrier::Hydrogen, k);
    ConstraintSet out;
    out.push_back(equal(row_name(v, "electricity", k), v.out_flow(Carrier::Electricity, k),
                        c_h * p.efficiency * h2));
    out.push_back(equal(row_name(v, "heat", k), v.out_flow(Carrier::Heat, k),
                        c_h * (1.0 - p.efficiency) * p.heat_efficiency * h2));
    return out;
}

ConstraintSet device_constraints(const DeviceSpec& d, const DeviceVariables& v,
                                 const DeviceContext& ctx, int k) {
    switch (d.type()) {
        case DeviceType::Well: return well_constraints(d, v, k);
        case DeviceType::Separator: return separator_constraints(d, v, k);
        case DeviceType::Compressor: return compressor_constraints(d, v, ctx, k);
        case DeviceType::Pump: return pump_constraints(d, v, ctx, k);
        case DeviceType::GasTurbine: return gas_turbine_constraints(d, v, ctx, k);
        case DeviceType::Heater: return heater_constraints(d, v, k);
        case DeviceType::Source:
        case DeviceType::Sink: return source_sink_constraints(d, v, k);
        case DeviceType::Battery: return battery_constraints(d, v, ctx, k);
        case DeviceType::HydrogenStorage:
            return hydrogen_storage_constraints(d, v, ctx, k, k == v.horizon - 1,
                                                storage_target(d, v.history));
        case DeviceType::Electrolyser: return electrolyser_constraints(d, v, ctx, k);
        case DeviceType::FuelCell: return fuel_cell_constraints(d, v, ctx, k);
    }
    return {};
}

}  // namespace platopt
