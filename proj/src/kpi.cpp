#include "platopt/kpi.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "platopt/devices.hpp"
#include "platopt/errors.hpp"

namespace platopt {

namespace {

const std::vector<double>* find_series(const SimulationResult& r, const std::string& name) {
    auto it = r.series.find(name);
    return it == r.series.end() ? nullptr : &it->second;
}

double at(const SimulationResult& r, const std::string& name, std::size_t t,
          double fallback = 0.0) {
    const auto* s = find_series(r, name);
    return s ? (*s)[t] : fallback;
}

std::string flow_name(const DeviceSpec& d, bool input, Carrier c) {
    return fmt::format("dev.{}.{}.{}", d.id, input ? "in" : "out", to_string(c));
}

bool has(const std::vector<Carrier>& list, Carrier c) {
    return std::find(list.begin(), list.end(), c) != list.end();
}

std::size_t steps_of(const SimulationResult& r) { return static_cast<std::size_t>(r.steps); }

}  // namespace

std::vector<double> emission_series(const SimulationResult& r, const EnergySystemModel& model) {
    std::vector<double> out(steps_of(r), 0.0);
    const double co2 = model.carrier(Carrier::Gas).co2_content.value_or(0.0);
    for (const auto& d : model.devices) {
        if (!is_gas_combusting(d)) continue;
        for (std::size_t t = 0; t < out.size(); ++t) {
            out[t] += co2 * (at(r, flow_name(d, true, Carrier::Gas), t) -
                             at(r, flow_name(d, false, Carrier::Gas), t));
        }
    }
    return out;
}

std::vector<DeviceUsage> gas_turbine_usage(const SimulationResult& r,
                                           const EnergySystemModel& model) {
    const double dt = r.timestep_minutes / 60.0;
    std::vector<DeviceUsage> out;
    for (const auto& d : model.devices) {
        if (d.type() != DeviceType::GasTurbine) continue;
        DeviceUsage u;
        u.device = d.id;
        for (std::size_t t = 0; t < steps_of(r); ++t) {
            u.running_hours += at(r, "dev." + d.id + ".on", t, 1.0) * dt;
            u.prep_hours += at(r, "dev." + d.id + ".prep", t) * dt;
            u.starts += static_cast<int>(at(r, "dev." + d.id + ".start", t));
            u.stops += static_cast<int>(at(r, "dev." + d.id + ".stop", t));
        }
        out.push_back(u);
    }
    return out;
}

ReserveSeries reserve_series(const SimulationResult& r, const EnergySystemModel& model) {
    ReserveSeries out;
    out.total.assign(steps_of(r), 0.0);
    for (const auto& d : model.devices) {
        const bool gives = d.reserve_factor > 0.0 && has(device_outputs(d), Carrier::Electricity);
        const bool sheds =
            d.load_reserve_factor > 0.0 && has(device_inputs(d), Carrier::Electricity);
        if (!gives && !sheds) continue;
        auto& mine = out.by_device[d.id];
        mine.assign(steps_of(r), 0.0);
        for (std::size_t t = 0; t < steps_of(r); ++t) {
            double v = 0.0;
            if (gives) {
                const double available =
                    d.type() == DeviceType::Battery
                        ? at(r, "dev." + d.id + ".pmax", t)
                        : d.flow_max * at(r, "dev." + d.id + ".profile", t, 1.0) *
                              at(r, "dev." + d.id + ".on", t, 1.0);
                v += d.reserve_factor * (available - at(r, flow_name(d, false, Carrier::Electricity), t));
            }
            if (sheds) v += d.load_reserve_factor * at(r, flow_name(d, true, Carrier::Electricity), t);
            mine[t] = v;
            out.total[t] += v;
        }
    }
    return out;
}

std::vector<StorageSeries> storage_series(const SimulationResult& r,
                                          const EnergySystemModel& model) {
    std::vector<StorageSeries> out;
    for (const auto& d : model.devices) {
        if (!is_storage(d.type())) continue;
        const Carrier c =
            d.type() == DeviceType::Battery ? Carrier::Electricity : Carrier::Hydrogen;
        StorageSeries s;
        s.device = d.id;
        for (std::size_t t = 0; t < steps_of(r); ++t) {
            s.inflow.push_back(at(r, flow_name(d, true, c), t));
            s.outflow.push_back(at(r, flow_name(d, false, c), t));
            s.level.push_back(at(r, "dev." + d.id + ".level", t));
        }
        out.push_back(std::move(s));
    }
    return out;
}

KpiSummary compute_kpis(const SimulationResult& r, const EnergySystemModel& model) {
    KpiSummary k;
    k.steps = r.steps;
    k.timestep_minutes = r.timestep_minutes;
    const double dt_s = r.timestep_minutes * 60.0;
    const double dt_h = r.timestep_minutes / 60.0;
    for (double e : emission_series(r, model)) k.emission_total_kg += e * dt_s;
    if (r.steps > 0) k.emission_mean_kg_per_s = k.emission_total_kg / (dt_s * r.steps);
    for (const auto& d : model.devices) {
        if (!is_gas_combusting(d)) continue;
        for (std::size_t t = 0; t < steps_of(r); ++t) {
            k.gas_burned_sm3 += (at(r, flow_name(d, true, Carrier::Gas), t) -
                                 at(r, flow_name(d, false, Carrier::Gas), t)) *
                                dt_s;
        }
    }
    k.gas_turbines = gas_turbine_usage(r, model);
    for (const auto& u : k.gas_turbines) {
        k.gt_running_hours += u.running_hours;
        k.gt_prep_hours += u.prep_hours;
        k.gt_starts += u.starts;
        k.gt_stops += u.stops;
    }
    const auto reserve = reserve_series(r, model);
    if (!reserve.total.empty()) {
        k.min_reserve_mw = *std::min_element(reserve.total.begin(), reserve.total.end());
    }
    for (const auto& [name, values] : r.series) {
        const bool node_slack = name.starts_with("node.") && name.ends_with(".slack");
        const bool reserve_slack = name == "system.reserve_slack";
        if (!node_slack && !reserve_slack) continue;
        k.elastic_active = true;
        double sum = 0.0;
        for (double v : values) sum += v * dt_h;
        (node_slack ? k.elastic_supply_mwh : k.elastic_reserve_mwh) += sum;
    }
    return k;
}

std::vector<ComparisonRow> compare_cases(const std::vector<KpiSummary>& cases) {
    if (cases.size() < 2) throw ConfigError("comparison needs at least two cases");
    for (const auto& c : cases) {
        if (c.steps != cases.front().steps || c.timestep_minutes != cases.front().timestep_minutes) {
            throw ConfigError("cases cover different spans");
        }
    }
    struct Field {
        const char* name;
        double (*get)(const KpiSummary&);
    };
    const Field fields[] = {
        {"emission_total_kg", [](const KpiSummary& k) { return k.emission_total_kg; }},
        {"emission_mean_kg_per_s", [](const KpiSummary& k) { return k.emission_mean_kg_per_s; }},
        {"gt_running_hours", [](const KpiSummary& k) { return k.gt_running_hours; }},
        {"gt_prep_hours", [](const KpiSummary& k) { return k.gt_prep_hours; }},
        {"gt_starts", [](const KpiSummary& k) { return static_cast<double>(k.gt_starts); }},
        {"gt_stops", [](const KpiSummary& k) { return static_cast<double>(k.gt_stops); }},
    };
    std::vector<ComparisonRow> rows;
    for (const auto& f : fields) {
        ComparisonRow row;
        row.kpi = f.name;
        const double base = f.get(cases.front());
        for (const auto& c : cases) {
            const double v = f.get(c);
            row.values.push_back(v);
            if (base != 0.0) {
                row.ratios.push_back(v / base);
            } else {
                row.ratios.push_back(v == 0.0 ? 1.0 : std::numeric_limits<double>::quiet_NaN());
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

AuditReport conservation_audit(const SimulationResult& r, const EnergySystemModel& model,
                               const SimulationConfig& config) {
    AuditReport report;
    auto note_balance = [&](double residual, const std::string& what) {
        ++report.checked_rows;
        if (std::abs(residual) > report.max_balance_residual) {
            report.max_balance_residual = std::abs(residual);
            report.worst_balance = what;
        }
    };
    auto note_storage = [&](double residual, const std::string& what) {
        ++report.checked_rows;
        if (std::abs(residual) > report.max_storage_residual) {
            report.max_storage_residual = std::abs(residual);
            report.worst_storage = what;
        }
    };

    for (const auto& node : model.nodes) {
        for (Carrier c : kNetworkCarriers) {
            const auto cname = std::string(to_string(c));
            bool present = false;
            for (const auto& d : model.devices) {
                if (d.node == node.id && (has(device_inputs(d), c) || has(device_outputs(d), c))) {
                    present = true;
                }
            }
            for (const auto& e : model.edges) {
                if (e.carrier == c && (e.from == node.id || e.to == node.id)) present = true;
            }
            if (!present) continue;
            const std::string qterm = fmt::format("node.{}.qterm.{}", node.id, cname);
            for (std::size_t t = 0; t < steps_of(r); ++t) {
                double in = 0.0;
                double out = 0.0;
                for (const auto& d : model.devices) {
                    if (d.node != node.id) continue;
                    if (has(device_inputs(d), c)) in -= at(r, flow_name(d, true, c), t);
                    if (has(device_outputs(d), c)) out -= at(r, flow_name(d, false, c), t);
                }
                for (const auto& e : model.edges) {
                    if (e.carrier != c) continue;
                    const std::string base = "edge." + e.id;
                    if (e.to == node.id) in += at(r, base + ".flow", t) - at(r, base + ".loss_plus", t);
                    if (e.from == node.id) {
                        out += at(r, base + ".flow", t) + at(r, base + ".loss_minus", t);
                    }
                }
                in -= at(r, qterm, t);
                out -= at(r, qterm, t);
                if (c == Carrier::Electricity) in += at(r, "node." + node.id + ".slack", t);
                const std::string where = fmt::format("node {} {} step {}", node.id, cname, t);
                note_balance(in, where + " in");
                note_balance(out, where + " out");
            }
        }
    }

    const double dt_h = config.timestep_hours();
    const double dt_s = config.timestep_seconds();
    for (const auto& d : model.devices) {
        if (!is_storage(d.type())) continue;
        const bool battery = d.type() == DeviceType::Battery;
        const Carrier c = battery ? Carrier::Electricity : Carrier::Hydrogen;
        const double eta = battery ? d.as<BatteryParams>().efficiency : 1.0;
        const double initial = initial_storage_level(d);
        double previous = initial;
        double telescoped = initial;
        for (std::size_t t = 0; t < steps_of(r); ++t) {
            const double in = at(r, flow_name(d, true, c), t);
            const double out = at(r, flow_name(d, false, c), t);
            const double change = battery ? (eta * in - out / eta) * dt_h : (in - out) * dt_s;
            const double level = at(r, "dev." + d.id + ".level", t);
            telescoped += change;
            note_storage(level - previous - change, fmt::format("storage {} step {}", d.id, t));
            note_storage(level - telescoped,
                         fmt::format("storage {} telescoped to step {}", d.id, t));
            previous = level;
        }
    }
    return report;
}

}  // namespace platopt
