#include "platopt/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <future>
#include <ostream>

#include <json.hpp>

#include "platopt/assembly.hpp"
#include "platopt/io.hpp"
#include "platopt/kpi.hpp"
#include "platopt/plot.hpp"
#include "platopt/simulation.hpp"
#include "platopt/solver.hpp"

namespace platopt {

namespace fs = std::filesystem;

namespace {

struct Failure {
    int code;
    std::string kind;
    std::string message;
};

void print_error(std::ostream& err, const Failure& f) {
    nlohmann::json j;
    j["error"] = f.kind;
    j["exit_code"] = f.code;
    j["message"] = f.message;
    err << j.dump() << "\n";
}

std::string case_name(const fs::path& dir) {
    fs::path p = dir;
    if (p.filename().empty()) p = p.parent_path();
    return p.filename().string();
}

std::string number(double v) {
    if (std::isnan(v)) return "n/a";
    return fmt::format("{:.6g}", v);
}

void print_kpis(std::ostream& out, const KpiSummary& k) {
    auto row = [&](std::string_view name, const std::string& value) {
        out << fmt::format("{:<28}{:>16}\n", name, value);
    };
    row("steps", std::to_string(k.steps));
    row("timestep_minutes", number(k.timestep_minutes));
    row("emission_total_kg", number(k.emission_total_kg));
    row("emission_mean_kg_per_s", number(k.emission_mean_kg_per_s));
    row("gas_burned_sm3", number(k.gas_burned_sm3));
    row("gt_running_hours", number(k.gt_running_hours));
    row("gt_prep_hours", number(k.gt_prep_hours));
    row("gt_starts", std::to_string(k.gt_starts));
    row("gt_stops", std::to_string(k.gt_stops));
    row("min_reserve_mw", number(k.min_reserve_mw));
    if (k.elastic_active) {
        row("elastic_supply_mwh", number(k.elastic_supply_mwh));
        row("elastic_reserve_mwh", number(k.elastic_reserve_mwh));
    }
    for (const auto& u : k.gas_turbines) {
        out << fmt::format("  {:<12} running {:>8} h  prep {:>6} h  starts {:>3}  stops {:>3}\n",
                           u.device, number(u.running_hours), number(u.prep_hours), u.starts,
                           u.stops);
    }
}

int cmd_validate(const std::string& config_path, std::ostream& out, std::ostream& err) {
    const ConfigDocument doc = read_config(config_path);
    auto diagnostics = validate_model(doc.model);
    auto more = validate_config(doc.config, doc.model);
    diagnostics.insert(diagnostics.end(), more.begin(), more.end());
    for (const auto& d : diagnostics) out << d.element << ": " << d.message << "\n";
    if (!diagnostics.empty()) {
        print_error(err, {kExitUser, "validation",
                          fmt::format("{} diagnostic(s) in {}", diagnostics.size(), config_path)});
        return kExitUser;
    }
    out << fmt::format("ok: {} nodes, {} edges, {} devices, {} profiles\n", doc.model.nodes.size(),
                       doc.model.edges.size(), doc.model.devices.size(),
                       doc.model.profiles.profiles.size());
    return kExitOk;
}

struct SimulateOptions {
    std::string config;
    std::string out_dir;
    bool force = false;
    std::optional<std::uint64_t> seed;
    std::optional<int> span;
    bool quiet = false;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
    ConfigDocument doc = load_config(o.config);
    if (o.seed) doc.config.seed = *o.seed;
    if (o.span) doc.config.steps = *o.span;
    const std::string text = read_text_file(o.config);

    // Refuse before spending solver time.
    if (fs::exists(o.out_dir) && fs::is_directory(o.out_dir) && !fs::is_empty(o.out_dir) &&
        !o.force) {
        throw ConfigError(fmt::format(
            "output directory '{}' is not empty (use --force to overwrite)", o.out_dir));
    }

    auto backend = make_default_backend();
    ProgressCallback progress;
    if (!o.quiet) {
        progress = [&err](const WindowReport& w) {
            err << fmt::format("window {:>4} t0={:<6} {:<10} objective {:.6g}\n", w.index, w.t0,
                               to_string(w.status), w.objective);
        };
    }
    const SimulationResult result = run_simulation(doc.model, doc.config, *backend, progress);
    const ResultBundle bundle = make_bundle(result, doc, text, backend->name());
    write_results(bundle, o.out_dir, o.force);
    out << fmt::format("wrote {} steps in {} windows to {}\n", result.steps, result.windows.size(),
                       o.out_dir);
    print_kpis(out, bundle.kpis);
    return kExitOk;
}

int cmd_kpi(const std::string& dir, bool as_json, bool recompute, std::ostream& out) {
    const ResultBundle bundle = read_results(dir);
    KpiSummary k = bundle.kpis;
    if (recompute) k = compute_kpis(bundle.result, bundle_document(bundle).model);
    if (as_json) {
        out << format_kpi_json(k);
    } else {
        print_kpis(out, k);
    }
    return kExitOk;
}

int cmd_compare(const std::vector<std::string>& dirs, bool as_json, std::ostream& out) {
    std::vector<std::future<ResultBundle>> pending;
    for (const auto& d : dirs) {
        pending.push_back(std::async(std::launch::async, [d] { return read_results(d); }));
    }
    std::vector<KpiSummary> cases;
    for (auto& f : pending) cases.push_back(f.get().kpis);
    const auto rows = compare_cases(cases);

    if (as_json) {
        nlohmann::json j;
        j["cases"] = nlohmann::json::array();
        for (const auto& d : dirs) j["cases"].push_back(case_name(d));
        for (const auto& r : rows) {
            nlohmann::json ratios = nlohmann::json::array();
            for (double x : r.ratios) ratios.push_back(std::isnan(x) ? nlohmann::json() : nlohmann::json(x));
            j["kpis"][r.kpi] = {{"values", r.values}, {"ratios", ratios}};
        }
        out << j.dump(2) << "\n";
        return kExitOk;
    }
    out << fmt::format("{:<24}", "kpi");
    for (const auto& d : dirs) out << fmt::format("{:>14}", case_name(d));
    for (std::size_t i = 1; i < dirs.size(); ++i) out << fmt::format("{:>14}", "ratio:" + case_name(dirs[i]));
    out << "\n";
    for (const auto& r : rows) {
        out << fmt::format("{:<24}", r.kpi);
        for (double v : r.values) out << fmt::format("{:>14}", number(v));
        for (std::size_t i = 1; i < r.ratios.size(); ++i) out << fmt::format("{:>14}", number(r.ratios[i]));
        out << "\n";
    }
    return kExitOk;
}

int cmd_export(const std::string& config, int at, const std::string& format,
               const std::string& path, std::ostream& out) {
    ConfigDocument doc = load_config(config);
    if (at < 0) throw ConfigError("--at must be >= 0");
    ExportFormat fmt_kind = ExportFormat::Lp;
    std::string chosen = format;
    if (chosen.empty()) chosen = fs::path(path).extension() == ".mps" ? "mps" : "lp";
    if (chosen == "mps") {
        fmt_kind = ExportFormat::Mps;
    } else if (chosen != "lp") {
        throw ConfigError(fmt::format("unknown export format '{}'", format));
    }

    // Roll the boundary forward by simulating the steps before the window.
    BoundaryState boundary = BoundaryState::initial(doc.model);
    if (at > 0) {
        SimulationConfig prefix = doc.config;
        prefix.steps = at;
        auto backend = make_default_backend();
        boundary = run_simulation(doc.model, prefix, *backend).final_state;
    }
    TimeSeriesSet profiles = doc.model.profiles;
    apply_forecast_noise(profiles, doc.config);
    const PlanningProblem problem = assemble(doc.model, doc.config, profiles, boundary, at);
    export_problem(problem.milp, fmt_kind, path);
    out << fmt::format("wrote window at step {} ({} variables, {} rows) to {}\n", at,
                       problem.milp.variables().size(), problem.milp.constraints().size(), path);
    return kExitOk;
}

std::vector<double> column(const SimulationResult& r, const std::string& name) {
    auto it = r.series.find(name);
    return it == r.series.end() ? std::vector<double>(static_cast<std::size_t>(r.steps), 0.0)
                                : it->second;
}

int cmd_plot(const std::vector<std::string>& dirs, const std::string& out_dir, std::ostream& out) {
    std::vector<ResultBundle> bundles;
    for (const auto& d : dirs) bundles.push_back(read_results(d));
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError(fmt::format("cannot create '{}': {}", out_dir, ec.message()));
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& svg) {
        write_text_file(fs::path(out_dir) / name, svg);
        written.push_back(name);
    };

    std::vector<PlotSeries> emissions;
    for (std::size_t i = 0; i < bundles.size(); ++i) {
        const auto& b = bundles[i];
        const auto doc = bundle_document(b);
        const std::string label = case_name(dirs[i]);
        const double hours = b.result.timestep_minutes / 60.0;
        emissions.push_back({label, emission_series(b.result, doc.model)});
        const std::string prefix = bundles.size() > 1 ? label + "_" : "";

        std::vector<PlotSeries> online;
        std::vector<PlotSeries> supply;
        for (const auto& d : doc.model.devices) {
            if (d.type() == DeviceType::GasTurbine) {
                online.push_back({d.id, column(b.result, "dev." + d.id + ".on")});
            }
            const auto outs = device_outputs(d);
            if (std::find(outs.begin(), outs.end(), Carrier::Electricity) != outs.end()) {
                supply.push_back({d.id, column(b.result, "dev." + d.id + ".out.el")});
            }
        }
        if (!online.empty()) {
            emit(prefix + "gas_turbines.svg",
                 line_chart_svg("Gas turbines online", "time (h)", "units online", online, hours, true));
        }
        if (!supply.empty()) {
            emit(prefix + "electricity.svg",
                 line_chart_svg("Electricity supply", "time (h)", "MW", supply, hours, true));
        }
        const auto reserve = reserve_series(b.result, doc.model);
        std::vector<PlotSeries> by_device;
        for (const auto& [id, values] : reserve.by_device) by_device.push_back({id, values});
        if (!by_device.empty()) {
            emit(prefix + "reserve.svg",
                 line_chart_svg("Online power reserve", "time (h)", "MW", by_device, hours, true));
        }
        for (const auto& s : storage_series(b.result, doc.model)) {
            emit(prefix + "storage_" + s.device + ".svg",
                 line_chart_svg("Storage " + s.device, "time (h)", "level / flow",
                                {{"level", s.level}, {"inflow", s.inflow}, {"outflow", s.outflow}},
                                hours));
        }
    }
    emit("emissions.svg", line_chart_svg("CO2 emission rate", "time (h)", "kg/s", emissions,
                                         bundles.front().result.timestep_minutes / 60.0));
    if (bundles.size() > 1) {
        std::vector<KpiSummary> cases;
        for (const auto& b : bundles) cases.push_back(b.kpis);
        const auto rows = compare_cases(cases);
        std::vector<std::string> categories;
        std::vector<PlotSeries> bars;
        for (const auto& d : dirs) bars.push_back({case_name(d), {}});
        for (const auto& r : rows) {
            categories.push_back(r.kpi);
            for (std::size_t i = 0; i < r.ratios.size(); ++i) {
                bars[i].values.push_back(std::isnan(r.ratios[i]) ? 0.0 : r.ratios[i]);
            }
        }
        emit("kpi_comparison.svg", bar_chart_svg("KPIs relative to " + case_name(dirs.front()),
                                                 categories, bars));
    }
    for (const auto& name : written) out << (fs::path(out_dir) / name).string() << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rolling-horizon operational planning of offshore multi-carrier energy systems"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    std::string config;
    auto* validate = app.add_subcommand("validate", "Check a config file and list diagnostics");
    validate->add_option("--config", config, "Config file")->required();

    SimulateOptions sim;
    std::uint64_t seed = 0;
    int span = 0;
    auto* simulate = app.add_subcommand("simulate", "Run the rolling-horizon simulation");
    simulate->add_option("--config", sim.config, "Config file")->required();
    simulate->add_option("--out", sim.out_dir, "Result bundle directory")->required();
    simulate->add_flag("--force", sim.force, "Overwrite a non-empty output directory");
    auto* seed_opt = simulate->add_option("--seed", seed, "Override the config seed");
    auto* span_opt = simulate->add_option("--steps", span, "Override the simulated span")->check(CLI::NonNegativeNumber);
    simulate->add_flag("--quiet", sim.quiet, "No per-window progress");

    std::string bundle;
    bool as_json = false;
    bool recompute = false;
    auto* kpi = app.add_subcommand("kpi", "Print the KPI summary of a result bundle");
    kpi->add_option("bundle", bundle, "Result bundle directory")->required();
    kpi->add_flag("--json", as_json, "Print JSON");
    kpi->add_flag("--recompute", recompute, "Recompute from the stored series");

    std::vector<std::string> bundles;
    auto* compare = app.add_subcommand("compare", "Compare KPIs of several result bundles");
    compare->add_option("bundles", bundles, "Result bundle directories")->required()->expected(2, -1);
    compare->add_flag("--json", as_json, "Print JSON");

    int at = 0;
    std::string format;
    std::string out_path;
    auto* export_cmd = app.add_subcommand("export-problem", "Write the planning problem of one window");
    export_cmd->add_option("--config", config, "Config file")->required();
    export_cmd->add_option("--at", at, "Window start step")->required();
    export_cmd->add_option("--format", format, "lp or mps (default from the file extension)");
    export_cmd->add_option("--out", out_path, "Output file")->required();

    std::vector<std::string> plot_bundles;
    std::string plot_dir;
    auto* plot = app.add_subcommand("plot", "Render SVG charts of one or more result bundles");
    plot->add_option("bundles", plot_bundles, "Result bundle directories")->required();
    plot->add_option("--out", plot_dir, "Output directory for the charts")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        print_error(err, {kExitUser, "usage", e.what()});
        return kExitUser;
    }

    try {
        if (*validate) return cmd_validate(config, out, err);
        if (*simulate) {
            if (*seed_opt) sim.seed = seed;
            if (*span_opt) sim.span = span;
            return cmd_simulate(sim, out, err);
        }
        if (*kpi) return cmd_kpi(bundle, as_json, recompute, out);
        if (*compare) return cmd_compare(bundles, as_json, out);
        if (*export_cmd) return cmd_export(config, at, format, out_path, out);
        if (*plot) return cmd_plot(plot_bundles, plot_dir, out);
    } catch (const ValidationError& e) {
        for (const auto& d : e.diagnostics()) out << d.element << ": " << d.message << "\n";
        print_error(err, {kExitUser, "validation", e.what()});
        return kExitUser;
    } catch (const ConfigError& e) {
        print_error(err, {kExitUser, "config", e.what()});
        return kExitUser;
    } catch (const OutOfDataError& e) {
        print_error(err, {kExitUser, "out_of_data", e.what()});
        return kExitUser;
    } catch (const DomainError& e) {
        print_error(err, {kExitUser, "domain", e.what()});
        return kExitUser;
    } catch (const AssemblyError& e) {
        print_error(err, {kExitUser, "assembly", e.what()});
        return kExitUser;
    } catch (const SolverError& e) {
        print_error(err, {kExitSolver, "solver", e.what()});
        return kExitSolver;
    } catch (const IoError& e) {
        print_error(err, {kExitIo, "io", e.what()});
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        print_error(err, {kExitIo, "io", e.what()});
        return kExitIo;
    } catch (const std::exception& e) {
        print_error(err, {kExitIo, "internal", e.what()});
        return kExitIo;
    }
    return kExitUser;
}

}  // namespace platopt
