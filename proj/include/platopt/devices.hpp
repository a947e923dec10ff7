#pragma once

// Per-device decision variables for one planning window and the constraint
// generators for every device type. Step index k is local to the window;
// k < 0 refers to the boundary history.

#include <map>
#include <optional>
#include <vector>

#include "platopt/lp.hpp"
#include "platopt/model.hpp"

namespace platopt {

/// State of one device just before the window starts.
struct DeviceHistory {
    int on = 0;               // y_on(t0 - 1)
    std::vector<int> starts;  // starts[j] = y_start(t0 - 1 - j), depth >= t_s
    std::optional<double> flow;   // f(t0 - 1), enables ramp limits at k = 0
    std::optional<double> level;  // storage level E(t0 - 1)

    bool operator==(const DeviceHistory&) const = default;
};

/// History used at the very first simulated step.
DeviceHistory initial_history(const DeviceSpec& device);

/// Default initial storage level (50% of the maximum unless configured).
double initial_storage_level(const DeviceSpec& device);

struct DeviceVariables {
    const DeviceSpec* spec = nullptr;
    DeviceHistory history;
    int t0 = 0;
    int horizon = 0;

    std::map<Carrier, std::vector<VarId>> in;
    std::map<Carrier, std::vector<VarId>> out;
    std::vector<VarId> flow;  // explicit flow variable (well, separator)

    std::vector<VarId> y_on, y_prep, y_start, y_stop;  // empty without start-stop

    std::vector<VarId> level;      // storage E(k)
    std::vector<VarId> p_max;      // battery available power
    std::vector<VarId> y_storage;  // battery min() selector
    VarId deviation;               // end-of-window storage deficit delta_E

    // Terminal pressures attached by the network assembly (invalid when the
    // node does not model the carrier's pressure).
    std::map<Carrier, std::vector<VarId>> p_in;
    std::map<Carrier, std::vector<VarId>> p_out;

    /// Profile factor pr(k) for the window (1 when the device has none).
    std::vector<double> profile;

    bool has_start_stop() const { return !y_on.empty(); }

    /// The generic flow alias f(k) of the device type.
    LinearExpr f(int k) const;
    /// y_on(k), from history for k < 0 and constant 1 without start-stop.
    LinearExpr on(int k) const;
    /// y_prep(k); 0 without start-stop.
    LinearExpr prep(int k) const;
    /// y_start(k), from history for k < 0.
    LinearExpr start(int k) const;
    LinearExpr in_flow(Carrier c, int k) const;
    LinearExpr out_flow(Carrier c, int k) const;
    /// Storage level E(k), from history for k = -1.
    LinearExpr storage_level(int k) const;
    double pr(int k) const {
        return profile.empty() ? 1.0 : profile[static_cast<std::size_t>(k)];
    }
};

/// Register every variable of the device for steps [0, horizon).
DeviceVariables create_device_variables(MilpModel& milp, const DeviceSpec& spec,
                                        const DeviceHistory& history, int t0, int horizon);

struct DeviceContext {
    const EnergySystemModel* model = nullptr;
    double dt_hours = 1.0 / 12.0;
    double dt_seconds = 300.0;
};

/// Flow bounds scaled by the profile, ramp limits and start-stop logic.
ConstraintSet generic_device_constraints(const DeviceSpec& spec, const DeviceVariables& vars,
                                         int k);

ConstraintSet well_constraints(const DeviceSpec& spec, const DeviceVariables& vars, int k);
ConstraintSet separator_constraints(const DeviceSpec& spec, const DeviceVariables& vars, int k);
ConstraintSet compressor_constraints(const DeviceSpec& spec, const DeviceVariables& vars,
                                     const DeviceContext& ctx, int k);
ConstraintSet pump_constraints(const DeviceSpec& spec, const DeviceVariables& vars,
                               const DeviceContext& ctx, int k);
ConstraintSet gas_turbine_constraints(const DeviceSpec& spec, const DeviceVariables& vars,
                                      const DeviceContext& ctx, int k);
ConstraintSet heater_constraints(const DeviceSpec& spec, const DeviceVariables& vars, int k);
ConstraintSet source_sink_constraints(const DeviceSpec& spec, const DeviceVariables& vars,
                                      int k);
ConstraintSet battery_constraints(const DeviceSpec& spec, const DeviceVariables& vars,
                                  const DeviceContext& ctx, int k);
/// E_target is the level the window should end at.
ConstraintSet hydrogen_storage_constraints(const DeviceSpec& spec, const DeviceVariables& vars,
                                           const DeviceContext& ctx, int k, bool is_last_step,
                                           double target);
ConstraintSet electrolyser_constraints(const DeviceSpec& spec, const DeviceVariables& vars,
                                       const DeviceContext& ctx, int k);
ConstraintSet fuel_cell_constraints(const DeviceSpec& spec, const DeviceVariables& vars,
                                    const DeviceContext& ctx, int k);

/// Battery big-M value (configured, or 2 f_max + E_max / t_res).
double battery_big_m(const DeviceSpec& spec);

/// Level the storage should end the window at.
double storage_target(const DeviceSpec& spec, const DeviceHistory& history);

/// Type-specific constraints for step k (dispatches on the device type).
ConstraintSet device_constraints(const DeviceSpec& spec, const DeviceVariables& vars,
                                 const DeviceContext& ctx, int k);

}  // namespace platopt
