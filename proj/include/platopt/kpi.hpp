#pragma once

// Indicators computed from committed trajectories only, so they can be
// recomputed from a persisted result bundle.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "platopt/model.hpp"
#include "platopt/simulation.hpp"

namespace platopt {

/// kg CO2/s per step from gas-combusting devices.
std::vector<double> emission_series(const SimulationResult& result, const EnergySystemModel& model);

struct DeviceUsage {
    std::string device;
    double running_hours = 0.0;  // sum of y_on dt
    double prep_hours = 0.0;     // sum of y_prep dt
    int starts = 0;
    int stops = 0;

    bool operator==(const DeviceUsage&) const = default;
};

std::vector<DeviceUsage> gas_turbine_usage(const SimulationResult& result,
                                           const EnergySystemModel& model);

struct ReserveSeries {
    std::vector<double> total;
    std::map<std::string, std::vector<double>> by_device;
};

ReserveSeries reserve_series(const SimulationResult& result, const EnergySystemModel& model);

struct StorageSeries {
    std::string device;
    std::vector<double> inflow;
    std::vector<double> outflow;
    std::vector<double> level;
};

std::vector<StorageSeries> storage_series(const SimulationResult& result,
                                          const EnergySystemModel& model);

struct KpiSummary {
    int steps = 0;
    double timestep_minutes = 0.0;
    double emission_total_kg = 0.0;
    double emission_mean_kg_per_s = 0.0;
    double gas_burned_sm3 = 0.0;
    double gt_running_hours = 0.0;
    double gt_prep_hours = 0.0;
    int gt_starts = 0;
    int gt_stops = 0;
    std::vector<DeviceUsage> gas_turbines;
    double min_reserve_mw = 0.0;
    bool elastic_active = false;
    double elastic_supply_mwh = 0.0;   // energy served by the electricity slack
    double elastic_reserve_mwh = 0.0;  // reserve shortfall covered by slack

    bool operator==(const KpiSummary&) const = default;
};

KpiSummary compute_kpis(const SimulationResult& result, const EnergySystemModel& model);

struct ComparisonRow {
    std::string kpi;
    std::vector<double> values;
    std::vector<double> ratios;  // relative to the first case; NaN when undefined
};

/// Per-KPI values and ratios to the first case. Throws ConfigError when the
/// spans differ or fewer than two cases are given.
std::vector<ComparisonRow> compare_cases(const std::vector<KpiSummary>& cases);

struct AuditReport {
    double max_balance_residual = 0.0;
    std::string worst_balance;
    double max_storage_residual = 0.0;  // per-step balance and telescoped level
    std::string worst_storage;
    int checked_rows = 0;

    double max_residual() const { return std::max(max_balance_residual, max_storage_residual); }
};

/// Recompute every node terminal balance and storage balance from the
/// committed series.
AuditReport conservation_audit(const SimulationResult& result, const EnergySystemModel& model,
                               const SimulationConfig& config);

}  // namespace platopt
