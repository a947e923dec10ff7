#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "platopt/cli.hpp"
#include "platopt/errors.hpp"
#include "platopt/io.hpp"
#include "platopt/kpi.hpp"
#include "platopt/physics.hpp"
#include "platopt/simulation.hpp"
#include "platopt/solver.hpp"

namespace py = pybind11;
using namespace platopt;

namespace {

py::dict kpi_dict(const KpiSummary& k) {
    py::dict d;
    d["steps"] = k.steps;
    d["timestep_minutes"] = k.timestep_minutes;
    d["emission_total_kg"] = k.emission_total_kg;
    d["emission_mean_kg_per_s"] = k.emission_mean_kg_per_s;
    d["gas_burned_sm3"] = k.gas_burned_sm3;
    d["gt_running_hours"] = k.gt_running_hours;
    d["gt_prep_hours"] = k.gt_prep_hours;
    d["gt_starts"] = k.gt_starts;
    d["gt_stops"] = k.gt_stops;
    d["min_reserve_mw"] = k.min_reserve_mw;
    d["elastic_active"] = k.elastic_active;
    d["elastic_supply_mwh"] = k.elastic_supply_mwh;
    d["elastic_reserve_mwh"] = k.elastic_reserve_mwh;
    py::list units;
    for (const auto& u : k.gas_turbines) {
        py::dict x;
        x["device"] = u.device;
        x["running_hours"] = u.running_hours;
        x["prep_hours"] = u.prep_hours;
        x["starts"] = u.starts;
        x["stops"] = u.stops;
        units.append(x);
    }
    d["gas_turbines"] = units;
    return d;
}

py::dict result_dict(const SimulationResult& r, const EnergySystemModel& model) {
    py::dict d;
    d["steps"] = r.steps;
    d["timestep_minutes"] = r.timestep_minutes;
    d["series"] = r.series;
    py::list windows;
    for (const auto& w : r.windows) {
        py::dict x;
        x["index"] = w.index;
        x["t0"] = w.t0;
        x["committed"] = w.committed;
        x["status"] = std::string(to_string(w.status));
        x["objective"] = w.objective;
        x["max_residual"] = w.max_residual;
        windows.append(x);
    }
    d["windows"] = windows;
    d["emission"] = emission_series(r, model);
    d["kpis"] = kpi_dict(compute_kpis(r, model));
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Rolling-horizon operational planning of offshore multi-carrier energy systems";
    m.attr("__version__") = std::string(kVersion);

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    m.def("validate", [](const std::filesystem::path& path) {
        const auto doc = read_config(path);
        auto diagnostics = validate_model(doc.model);
        auto more = validate_config(doc.config, doc.model);
        diagnostics.insert(diagnostics.end(), more.begin(), more.end());
        std::vector<std::string> out;
        for (const auto& d : diagnostics) out.push_back(d.element + ": " + d.message);
        return out;
    }, py::arg("config"), "Diagnostics of a config file (empty when valid).");

    m.def("simulate", [](const std::filesystem::path& path, std::optional<int> steps,
                         std::optional<std::uint64_t> seed) {
        ConfigDocument doc = load_config(path);
        if (steps) doc.config.steps = *steps;
        if (seed) doc.config.seed = *seed;
        auto backend = make_default_backend();
        SimulationResult r;
        {
            py::gil_scoped_release release;
            r = run_simulation(doc.model, doc.config, *backend);
        }
        return result_dict(r, doc.model);
    }, py::arg("config"), py::arg("steps") = py::none(), py::arg("seed") = py::none(),
       "Run the rolling-horizon simulation of a config file.");

    m.def("read_results", [](const std::filesystem::path& dir) {
        const auto bundle = read_results(dir);
        py::dict d = result_dict(bundle.result, bundle_document(bundle).model);
        d["kpis"] = kpi_dict(bundle.kpis);
        return d;
    }, py::arg("bundle"), "Load a result bundle written by `simulate`.");

    m.def("well_split", [](double gor, double water_cut) {
        const auto s = physics::well_split(gor, water_cut);
        py::dict d;
        d["water"] = s.water;
        d["oil"] = s.oil;
        d["gas"] = s.gas;
        return d;
    }, py::arg("gas_oil_ratio"), py::arg("water_cut"));

    m.def("gas_turbine_fuel", &physics::gas_turbine_fuel, py::arg("el_out"), py::arg("flow_max"),
          py::arg("fuel_a"), py::arg("fuel_b"), py::arg("on"), py::arg("prep"), py::arg("calorific"));

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
            py::gil_scoped_release release;
            code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "Run the command-line tool in process; returns (exit_code, stdout, stderr).");
}
