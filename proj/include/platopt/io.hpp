#pragma once

// Config, time-series and result-bundle persistence.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "platopt/errors.hpp"
#include "platopt/kpi.hpp"
#include "platopt/model.hpp"
#include "platopt/simulation.hpp"

namespace platopt {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Dimension {
    Dimensionless,
    Time,           // min
    Power,          // MW
    Energy,         // MWh
    VolumeFlow,     // Sm3/s (m3/s for liquids)
    Volume,         // Sm3
    Pressure,       // MPa
    Length,         // m
    Temperature,    // K
    MassFlow,       // kg/s
    ApparentPower,  // MVA
    HeatingValue,   // MJ/Sm3
    Density,        // kg/Sm3 or kg/m3
};

/// Parse "<number> <unit>" and convert to the internal unit of the
/// dimension. Dimensionless quantities must be bare numbers.
double parse_quantity(std::string_view text, Dimension dimension);
std::string_view internal_unit(Dimension dimension);

/// Thrown when a config parses but fails model or simulation validation.
class ValidationError : public ConfigError {
public:
    explicit ValidationError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

struct ConfigDocument {
    EnergySystemModel model;
    SimulationConfig config;

    bool operator==(const ConfigDocument&) const = default;
};

/// Parse a config text. The time series referenced by `simulation.timeseries`
/// is read relative to `base_dir` unless `load_profiles` is false. Throws
/// ConfigError (with line and column) on syntax, schema or unit errors.
ConfigDocument parse_config(std::string_view text, const std::filesystem::path& base_dir,
                            bool load_profiles = true);

/// parse_config on a file, without model validation.
ConfigDocument read_config(const std::filesystem::path& path, bool load_profiles = true);

/// read_config followed by validate_model and validate_config; throws
/// ValidationError with every diagnostic.
ConfigDocument load_config(const std::filesystem::path& path);

/// Config text in internal units. Parsing it back yields an equal document.
std::string serialize_config(const ConfigDocument& document);

/// Header `step,<id>.forecast[,<id>.nowcast]...`, one row per step.
TimeSeriesSet parse_timeseries(std::string_view text, std::string_view source = "timeseries");
TimeSeriesSet load_timeseries(const std::filesystem::path& path);
std::string format_timeseries(const TimeSeriesSet& series);

std::string sha256_hex(std::string_view data);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

struct RunMetadata {
    std::string version;
    std::string config_sha256;
    std::string timeseries_sha256;  // of the profile set as loaded
    std::uint64_t seed = 0;
    int steps = 0;
    double timestep_minutes = 0.0;
    std::string solver;

    bool operator==(const RunMetadata&) const = default;
};

struct ResultBundle {
    RunMetadata metadata;
    std::string config_text;  // verbatim copy of the config that produced the run
    SimulationResult result;
    KpiSummary kpis;
};

ResultBundle make_bundle(const SimulationResult& result, const ConfigDocument& document,
                         std::string config_text, std::string_view solver_name);

/// Writes series.csv, windows.csv, kpi.json, metadata.json and config.yaml.
/// Refuses a non-empty directory unless `force` is set. Throws IoError.
void write_results(const ResultBundle& bundle, const std::filesystem::path& dir, bool force);

/// Inverse of write_results (window wall times and the final boundary state
/// are not persisted).
ResultBundle read_results(const std::filesystem::path& dir);

/// The model embedded in a bundle, without its profiles.
ConfigDocument bundle_document(const ResultBundle& bundle);

std::string format_series_csv(const SimulationResult& result);
std::string format_kpi_json(const KpiSummary& kpis);
KpiSummary parse_kpi_json(std::string_view text);

}  // namespace platopt
