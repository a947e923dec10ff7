#pragma once

// Domain types describing one installation: carriers, nodes, edges, devices,
// time-series profiles and the simulation settings.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace platopt {

enum class Carrier { Electricity, Heat, Oil, Gas, Water, Hydrogen, Wellstream };

std::string_view to_string(Carrier carrier);
std::optional<Carrier> carrier_from_string(std::string_view name);

/// Carriers that can flow on edges and through node terminals.
inline constexpr Carrier kNetworkCarriers[] = {
    Carrier::Electricity, Carrier::Heat,  Carrier::Oil,
    Carrier::Gas,         Carrier::Water, Carrier::Hydrogen};

inline bool is_fluid(Carrier c) {
    return c == Carrier::Oil || c == Carrier::Gas || c == Carrier::Water ||
           c == Carrier::Hydrogen;
}

/// Physical constants attached to a carrier. Only the fields relevant to the
/// carrier are set.
struct CarrierProperties {
    std::optional<double> calorific_value;  // MJ/Sm3 (gas, hydrogen)
    std::optional<double> co2_content;      // kg/Sm3 (gas)
    std::optional<double> gravity;          // G, dimensionless (gas)
    std::optional<double> compressibility;  // Z (gas)
    std::optional<double> temperature;      // T_f in K (gas)
    std::optional<double> density;          // kg/m3 (liquids)
    std::optional<double> darcy_friction;   // f_D (liquids)

    bool operator==(const CarrierProperties&) const = default;
};

enum class Terminal { In, Out };

struct NodePressure {
    double nominal = 0.0;                 // MPa, in-terminal
    std::optional<double> nominal_out;    // MPa, out-terminal (defaults to nominal)
    std::optional<double> max_deviation;  // relative, 0..1

    double nominal_at(Terminal t) const {
        return t == Terminal::Out && nominal_out ? *nominal_out : nominal;
    }
    bool operator==(const NodePressure&) const = default;
};

struct Node {
    std::string id;
    double elevation = 0.0;  // m
    bool angle_reference = false;
    std::map<Carrier, NodePressure> pressures;

    bool operator==(const Node&) const = default;
};

enum class FlowModel { Transport, DcPower, Weymouth, Darcy };

std::string_view to_string(FlowModel model);
std::optional<FlowModel> flow_model_from_string(std::string_view name);

struct LossPoint {
    double flow = 0.0;
    double loss = 0.0;
    bool operator==(const LossPoint&) const = default;
};

struct Edge {
    std::string id;
    Carrier carrier = Carrier::Electricity;
    std::string from;
    std::string to;
    std::optional<double> max_flow;  // MW or Sm3/s; absent means unbounded
    bool bidirectional = false;
    FlowModel model = FlowModel::Transport;
    std::optional<double> reactance;  // per unit
    std::vector<LossPoint> losses;    // empty means lossless
    std::optional<double> diameter_mm;
    std::optional<double> length_km;
    std::optional<double> base_temperature;  // K
    std::optional<double> base_pressure;     // MPa

    bool operator==(const Edge&) const = default;
};

struct PenaltyBreakpoint {
    double flow = 0.0;
    double penalty = 0.0;
    bool operator==(const PenaltyBreakpoint&) const = default;
};

/// Piecewise-linear penalty of a device's flow plus fixed terms charged while
/// the device is online or in start-up preparation.
struct PenaltyCurve {
    std::vector<PenaltyBreakpoint> breakpoints;
    double on_cost = 0.0;
    double prep_cost = 0.0;

    bool is_convex() const;
    bool operator==(const PenaltyCurve&) const = default;
};

struct StartStop {
    int delay_steps = 0;  // t_s
    double start_penalty = 0.0;
    double stop_penalty = 0.0;
    bool operator==(const StartStop&) const = default;
};

struct WellParams {
    double gas_oil_ratio = 0.0;  // R_s
    double water_cut = 0.0;      // r_w
    double injection_ratio = 0.0;
    std::optional<double> injection_pressure;  // MPa
    std::optional<double> separator_pressure;  // MPa
    bool operator==(const WellParams&) const = default;
};

struct SeparatorParams {
    double heat_factor = 0.0;  // MW per Sm3/s throughput
    double el_factor = 0.0;    // MW per Sm3/s throughput
    std::map<Carrier, double> outlet_pressure;  // MPa, optional per carrier
    bool operator==(const SeparatorParams&) const = default;
};

enum class CompressorDrive { Electric, Gas };

struct CompressorParams {
    CompressorDrive drive = CompressorDrive::Electric;
    double isentropic_efficiency = 0.75;
    double heat_capacity_ratio = 1.3;  // k
    double compressibility = 0.9;      // Z
    double gas_constant = 500.0;       // R, J/(kg K)
    double inlet_temperature = 300.0;  // K
    double density = 0.84;             // kg/Sm3
    std::optional<double> nominal_flow;             // Sm3/s
    std::optional<double> nominal_inlet_pressure;   // MPa
    std::optional<double> nominal_outlet_pressure;  // MPa
    bool operator==(const CompressorParams&) const = default;
};

struct PumpParams {
    Carrier carrier = Carrier::Water;
    double efficiency = 0.75;
    std::optional<double> nominal_inlet_pressure;   // MPa
    std::optional<double> nominal_outlet_pressure;  // MPa
    bool operator==(const PumpParams&) const = default;
};

struct GasTurbineParams {
    double fuel_a = 0.0;  // A
    double fuel_b = 0.0;  // B
    double heat_efficiency = 0.0;
    bool operator==(const GasTurbineParams&) const = default;
};

struct HeaterParams {
    double efficiency = 1.0;  // may exceed 1 for heat pumps
    bool operator==(const HeaterParams&) const = default;
};

struct SourceParams {
    Carrier carrier = Carrier::Electricity;
    bool operator==(const SourceParams&) const = default;
};

struct SinkParams {
    Carrier carrier = Carrier::Electricity;
    bool operator==(const SinkParams&) const = default;
};

struct BatteryParams {
    double efficiency = 1.0;
    double energy_max = 0.0;    // MWh
    double energy_min = 0.0;    // MWh
    double reserve_time = 0.25; // h, t_res
    std::optional<double> charge_max;     // MW, defaults to flow_max
    std::optional<double> initial_level;  // MWh, defaults to 50% of energy_max
    std::optional<double> big_m;          // defaults to 2 f_max + E_max / t_res
    bool operator==(const BatteryParams&) const = default;
};

struct HydrogenStorageParams {
    double energy_max = 0.0;  // Sm3
    double energy_min = 0.0;  // Sm3
    std::optional<double> target;         // Sm3, defaults to window-start level
    std::optional<double> initial_level;  // Sm3, defaults to 50% of energy_max
    bool operator==(const HydrogenStorageParams&) const = default;
};

struct ElectrolyserParams {
    double efficiency = 0.7;  // eta_h
    double heat_efficiency = 0.0;
    bool operator==(const ElectrolyserParams&) const = default;
};

struct FuelCellParams {
    double efficiency = 0.6;  // eta_cell
    double heat_efficiency = 0.0;
    bool operator==(const FuelCellParams&) const = default;
};

/// Order matches DeviceType.
using DeviceParams =
    std::variant<WellParams, SeparatorParams, CompressorParams, PumpParams,
                 GasTurbineParams, HeaterParams, SourceParams, SinkParams,
                 BatteryParams, HydrogenStorageParams, ElectrolyserParams,
                 FuelCellParams>;

enum class DeviceType {
    Well,
    Separator,
    Compressor,
    Pump,
    GasTurbine,
    Heater,
    Source,
    Sink,
    Battery,
    HydrogenStorage,
    Electrolyser,
    FuelCell,
};

std::string_view to_string(DeviceType type);
std::optional<DeviceType> device_type_from_string(std::string_view name);

struct DeviceSpec {
    std::string id;
    std::string node;
    DeviceParams params;
    double flow_max = 0.0;
    double flow_min = 0.0;
    std::optional<double> ramp_up;    // fraction of flow_max per step
    std::optional<double> ramp_down;  // fraction of flow_max per step
    std::optional<StartStop> start_stop;
    std::optional<PenaltyCurve> penalty;
    double storage_penalty = 0.0;  // c_storage, per unit of end-of-horizon deficit
    std::optional<std::string> profile;
    double reserve_factor = 0.0;       // x_res
    double load_reserve_factor = 0.0;  // x_L_res
    std::optional<bool> initial_on;
    std::optional<double> initial_flow;

    DeviceType type() const { return static_cast<DeviceType>(params.index()); }

    template <typename P>
    const P& as() const { return std::get<P>(params); }

    template <typename P>
    const P* maybe() const { return std::get_if<P>(&params); }

    bool operator==(const DeviceSpec&) const = default;
};

/// Carriers a device draws from the node's in-terminal / feeds to the
/// out-terminal.
std::vector<Carrier> device_inputs(const DeviceSpec& device);
std::vector<Carrier> device_outputs(const DeviceSpec& device);

/// Carriers for which the device connects the in- and out-terminal of its node
/// itself (pass-through devices), so the terminals must not be merged.
std::vector<Carrier> device_serial_carriers(const DeviceSpec& device);

bool is_storage(DeviceType type);
bool is_gas_combusting(const DeviceSpec& device);

struct Profile {
    std::string id;
    std::vector<double> forecast;
    std::optional<std::vector<double>> nowcast;

    bool operator==(const Profile&) const = default;
};

struct TimeSeriesSet {
    std::vector<Profile> profiles;

    const Profile* find(std::string_view id) const;
    /// Number of steps covered by every profile (0 when empty).
    std::size_t length() const;
    bool operator==(const TimeSeriesSet&) const = default;
};

struct SolverSettings {
    double mip_gap = 1e-4;
    double time_limit_s = 60.0;
    bool operator==(const SolverSettings&) const = default;
};

struct SimulationConfig {
    double timestep_minutes = 5.0;
    int horizon_steps = 24;
    int reoptimisation_steps = 6;
    int nowcast_steps = 0;
    double reserve_min = 0.0;  // MW
    std::optional<double> emission_cap;  // kg/s
    SolverSettings solver;
    std::uint64_t seed = 0;
    bool elastic = false;
    double s_base = 100.0;  // MVA
    std::optional<int> steps;  // simulated span; defaults to what the data covers
    std::string timeseries;    // path of the profile file, relative to the config
    std::map<std::string, double> forecast_noise;  // profile id -> sigma

    double timestep_hours() const { return timestep_minutes / 60.0; }
    double timestep_seconds() const { return timestep_minutes * 60.0; }
    bool operator==(const SimulationConfig&) const = default;
};

struct EnergySystemModel {
    std::map<Carrier, CarrierProperties> carriers;
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    std::vector<DeviceSpec> devices;
    TimeSeriesSet profiles;

    const Node* find_node(std::string_view id) const;
    const Edge* find_edge(std::string_view id) const;
    const DeviceSpec* find_device(std::string_view id) const;
    const CarrierProperties& carrier(Carrier c) const;

    bool operator==(const EnergySystemModel&) const = default;
};

struct Diagnostic {
    std::string element;
    std::string message;
    bool operator==(const Diagnostic&) const = default;
};

/// Structural and parameter checks. Returns one diagnostic per violation; an
/// empty list means the model can be assembled.
std::vector<Diagnostic> validate_model(const EnergySystemModel& model);
std::vector<Diagnostic> validate_config(const SimulationConfig& config,
                                        const EnergySystemModel& model);

/// Profile value at step t + horizon_offset. The nowcast is used for offsets
/// inside the nowcast window when one is present.
double profile_value(const Profile& profile, long t, long horizon_offset,
                     long nowcast_window);

/// Window of every profile: nowcast for offsets below the nowcast window,
/// forecast beyond.
std::map<std::string, std::vector<double>> forecast_view(const TimeSeriesSet& profiles, long t0,
                                                         long horizon, long nowcast_window);

/// nowcast + N(0, sigma^2) noise, clipped at zero. Deterministic for a seed.
std::vector<double> generate_forecast_from_nowcast(std::span<const double> nowcast,
                                                   double sigma, std::uint64_t seed);

/// Replace the forecast of each profile listed in the config's noise map by
/// a noisy copy of its nowcast. Each profile gets its own stream derived from
/// the config seed.
void apply_forecast_noise(TimeSeriesSet& profiles, const SimulationConfig& config);

/// Nominal (inlet, outlet) pressure for a compressor or pump, taken from the
/// device parameters or, failing that, from the node's pressure settings.
std::optional<std::pair<double, double>> nominal_pressures(
    const EnergySystemModel& model, const DeviceSpec& device);

}  // namespace platopt
