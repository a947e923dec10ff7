// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any fails.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "builders.hpp"
#include "oracles.hpp"
#include "platopt/cli.hpp"
#include "platopt/errors.hpp"
#include "platopt/io.hpp"
#include "platopt/kpi.hpp"
#include "platopt/physics.hpp"
#include "platopt/simulation.hpp"

using namespace platopt;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail.clear();
        if (!detail.empty()) detail += "; ";
        detail += why;
        pass = false;
    }
};

// Fixture runs are shared between criteria.
struct FixtureRun {
    ConfigDocument doc;
    SimulationResult result;
    KpiSummary kpis;
    double seconds = 0.0;
};

std::map<std::string, FixtureRun>& run_cache() {
    static std::map<std::string, FixtureRun> cache;
    return cache;
}

const FixtureRun& fixture_run(const std::string& name) {
    auto& cache = run_cache();
    if (auto it = cache.find(name); it != cache.end()) return it->second;
    FixtureRun run;
    run.doc = load_config(build::fixture(name));
    auto backend = make_default_backend();
    const auto start = Clock::now();
    run.result = run_simulation(run.doc.model, run.doc.config, *backend);
    run.seconds = seconds_since(start);
    run.kpis = compute_kpis(run.result, run.doc.model);
    return cache.emplace(name, std::move(run)).first->second;
}

// ------------------------------------------------------------------ C1

Outcome start_stop_exhaustive() {
    Outcome o;
    constexpr int kDelay = 4;
    constexpr int kHorizon = 8;
    EnergySystemModel m;
    m.nodes = {build::node("N")};
    m.carriers[Carrier::Gas] = build::gas_properties();
    const auto gt = build::gas_turbine("gt", "N", 20.0, 0.0, kDelay);
    DeviceHistory cold;
    cold.starts.assign(kDelay, 0);
    const auto p = build::device_problem(m, gt, cold, kHorizon);
    const std::size_t n = p.milp.variables().size();

    const auto start = Clock::now();
    int valid = 0;
    int undetermined = 0;
    for (unsigned bits = 0; bits < (1u << (2 * kHorizon)); ++bits) {
        std::vector<int> starts(kHorizon), stops(kHorizon);
        std::vector<double> values(n, std::numeric_limits<double>::quiet_NaN());
        for (int k = 0; k < kHorizon; ++k) {
            starts[k] = (bits >> k) & 1u;
            stops[k] = (bits >> (k + kHorizon)) & 1u;
            values[static_cast<std::size_t>(p.vars.y_start[k].index)] = starts[k];
            values[static_cast<std::size_t>(p.vars.y_stop[k].index)] = stops[k];
            values[static_cast<std::size_t>(p.vars.out.at(Carrier::Electricity)[k].index)] = 0.0;
        }
        if (oracle::propagate_equalities(p.milp, values) != 0) {
            ++undetermined;
            continue;
        }
        const bool feasible = platopt::check_solution(p.milp, values, 1e-9).empty();
        const auto trace = oracle::start_stop_machine(kDelay, 0, starts, stops);
        valid += trace.valid ? 1 : 0;
        if (feasible != trace.valid) {
            o.fail(fmt::format("sequence {:#06x}: model {} but state machine {}", bits,
                               feasible ? "accepts" : "rejects", trace.valid ? "accepts" : "rejects"));
            break;
        }
        if (!feasible) continue;
        for (int k = 0; k < kHorizon; ++k) {
            const double on = values[static_cast<std::size_t>(p.vars.y_on[k].index)];
            const double prep = values[static_cast<std::size_t>(p.vars.y_prep[k].index)];
            if (on != trace.on[k] || prep != trace.prep[k]) {
                o.fail(fmt::format("sequence {:#06x}: state differs at step {}", bits, k));
                break;
            }
        }
        if (!o.pass) break;
    }
    const double elapsed = seconds_since(start);
    if (undetermined > 0) o.fail(fmt::format("{} sequences left states undetermined", undetermined));
    if (elapsed >= 1.0) o.fail(fmt::format("took {:.2f} s", elapsed));

    // The solver itself on the documented sequence: start at step 2.
    auto fig = build::device_problem(m, gt, cold, 10);
    for (int k = 0; k < 10; ++k) {
        fig.milp.fix(fig.vars.y_start[k], k == 2 ? 1.0 : 0.0);
        fig.milp.fix(fig.vars.y_stop[k], 0.0);
    }
    const auto s = build::solve_exact(fig.milp);
    if (!s.ok()) {
        o.fail("start at step 2 not solvable");
    } else {
        for (int k = 0; k < 10; ++k) {
            const int prep = k >= 2 && k <= 5 ? 1 : 0;
            const int on = k >= 6 ? 1 : 0;
            if (std::abs(s.values[static_cast<std::size_t>(fig.vars.y_prep[k].index)] - prep) > 1e-9 ||
                std::abs(s.values[static_cast<std::size_t>(fig.vars.y_on[k].index)] - on) > 1e-9) {
                o.fail(fmt::format("solver state wrong at step {}", k));
                break;
            }
        }
    }
    if (o.pass) {
        o.detail = fmt::format("{} sequences, {} valid, exact match in {:.3f} s", 1u << (2 * kHorizon),
                               valid, elapsed);
    }
    return o;
}

// ------------------------------------------------------------------ C2

Outcome reserve_threshold() {
    Outcome o;
    const auto& run = fixture_run("reserve_day.yaml");
    const auto& wind_spec = *std::find_if(run.doc.model.devices.begin(), run.doc.model.devices.end(),
                                          [](const DeviceSpec& d) { return d.id == "wind"; });
    const auto* profile = run.doc.model.profiles.find(*wind_spec.profile);
    const auto& r = run.result;
    int below = 0;
    int mismatches = 0;
    std::string first;
    for (int t = 0; t < r.steps; ++t) {
        const double wind = wind_spec.flow_max * profile->forecast[static_cast<std::size_t>(t)];
        int online = 0;
        for (const char* id : {"gt1", "gt2", "gt3"}) {
            online += r.series.at(fmt::format("dev.{}.on", id))[static_cast<std::size_t>(t)] > 0.5;
        }
        const bool third = online >= 3;
        below += wind < 2.4 ? 1 : 0;
        if (third != (wind < 2.4)) {
            if (mismatches++ == 0) first = fmt::format("step {} wind {:.4f} MW online {}", t, wind, online);
        }
    }
    if (mismatches > 0) o.fail(fmt::format("{} mismatching steps, first at {}", mismatches, first));
    if (below == 0 || below == r.steps) o.fail("fixture does not cross the threshold");
    if (run.seconds >= 30.0) o.fail(fmt::format("took {:.1f} s", run.seconds));
    if (o.pass) {
        o.detail = fmt::format("{} of {} steps below 2.4 MW, third unit online exactly there ({:.1f} s)",
                               below, r.steps, run.seconds);
    }
    return o;
}

// ------------------------------------------------------------------ C3

Outcome battery_substitution() {
    Outcome o;
    const auto& base = fixture_run("reserve_day.yaml").kpis;
    const auto& bat = fixture_run("reserve_day_battery.yaml").kpis;
    if (!(bat.gt_starts < base.gt_starts)) {
        o.fail(fmt::format("GT starts {} with battery vs {} without", bat.gt_starts, base.gt_starts));
    }
    if (!(bat.gt_running_hours < base.gt_running_hours)) {
        o.fail(fmt::format("GT hours {:.2f} with battery vs {:.2f} without", bat.gt_running_hours,
                           base.gt_running_hours));
    }
    const double e_base = fixture_run("base.yaml").kpis.emission_total_kg;
    const double e_a = fixture_run("case_a.yaml").kpis.emission_total_kg;
    const double e_b = fixture_run("case_b.yaml").kpis.emission_total_kg;
    if (!(e_base > e_a && e_a > e_b)) {
        o.fail(fmt::format("emissions base {:.4g} A {:.4g} B {:.4g} not strictly decreasing", e_base,
                           e_a, e_b));
    }
    double elapsed = 0.0;
    for (const char* n : {"reserve_day.yaml", "reserve_day_battery.yaml", "base.yaml", "case_a.yaml",
                          "case_b.yaml"}) {
        elapsed += fixture_run(n).seconds;
    }
    if (elapsed >= 120.0) o.fail(fmt::format("took {:.1f} s", elapsed));
    if (o.pass) {
        o.detail = fmt::format(
            "starts {} -> {}, GT hours {:.1f} -> {:.1f}; emissions base {:.4g} > A {:.4g} > B {:.4g} kg "
            "({:.1f} s)",
            base.gt_starts, bat.gt_starts, base.gt_running_hours, bat.gt_running_hours, e_base, e_a, e_b,
            elapsed);
    }
    return o;
}

// ------------------------------------------------------------------ C4

EnergySystemModel toy_instance(std::mt19937_64& rng, int& steps, TimeSeriesSet& profiles,
                               SimulationConfig& config) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto between = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
    steps = 1 + static_cast<int>(rng() % 3);
    const int kind = static_cast<int>(rng() % 3);  // one GT, two GTs, GT and battery

    EnergySystemModel m;
    m.carriers[Carrier::Gas] = build::gas_properties();
    m.nodes = {build::node("N")};
    double capacity = 0.0;
    const int turbines = kind == 1 ? 2 : 1;
    for (int i = 0; i < turbines; ++i) {
        const double fmax = between(10.0, 25.0);
        auto gt = build::gas_turbine(fmt::format("gt{}", i + 1), "N", fmax, between(0.0, 0.3) * fmax, 0);
        const double mid = between(0.2, 0.8) * fmax;
        gt.penalty = PenaltyCurve{{{0.0, between(0.0, 1.0)}, {mid, between(1.0, 3.0)}, {fmax, between(3.0, 6.0)}},
                                  between(0.0, 1.0), 0.0};
        gt.start_stop->start_penalty = between(0.0, 3.0);
        gt.start_stop->stop_penalty = between(0.0, 1.0);
        gt.initial_on = u(rng) < 0.5;
        m.devices.push_back(gt);
        capacity += fmax;
    }
    if (kind == 2) {
        DeviceSpec bat;
        bat.id = "bat";
        bat.node = "N";
        bat.flow_max = between(1.0, 5.0);
        bat.storage_penalty = between(0.0, 2.0);
        bat.reserve_factor = 1.0;
        const double e_max = between(1.0, 5.0);
        bat.params = BatteryParams{between(0.8, 1.0), e_max, 0.0, 0.25, std::nullopt, between(0.0, 1.0) * e_max,
                                   std::nullopt};
        m.devices.push_back(bat);
    }
    auto wind = build::source("wind", "N", Carrier::Electricity, between(0.0, 15.0));
    wind.profile = "wind";
    wind.reserve_factor = u(rng) < 0.5 ? 1.0 : 0.0;
    m.devices.push_back(wind);
    const double demand = between(2.0, 0.9 * capacity);
    m.devices.push_back(build::sink("load", "N", Carrier::Electricity, demand, demand));
    m.devices.push_back(build::sink("heat_dump", "N", Carrier::Heat, 500.0));
    m.devices.push_back(build::source("gas", "N", Carrier::Gas, 100.0));

    std::vector<double> w;
    for (int k = 0; k < steps; ++k) w.push_back(u(rng));
    profiles.profiles = {{"wind", w, std::nullopt}};
    config = build::config(steps, steps, steps);
    config.reserve_min = u(rng) < 0.5 ? 0.0 : between(0.0, 6.0);
    return m;
}

Outcome milp_vs_enumeration() {
    Outcome o;
    std::mt19937_64 rng(20200);
    int feasible = 0;
    int infeasible = 0;
    double worst = 0.0;
    std::uint64_t patterns = 0;
    for (int instance = 0; feasible < 24 && instance < 200; ++instance) {
        int steps = 0;
        TimeSeriesSet profiles;
        SimulationConfig config;
        const auto m = toy_instance(rng, steps, profiles, config);
        const auto p = assemble(m, config, profiles, BoundaryState::initial(m), 0);
        const auto s = build::solve_exact(p.milp);
        const auto ref = oracle::enumerate_binaries(p.milp);
        patterns += ref.patterns;
        if (s.ok() != ref.feasible) {
            o.fail(fmt::format("instance {}: solver {} but enumeration {}", instance,
                               s.ok() ? "feasible" : "infeasible", ref.feasible ? "feasible" : "infeasible"));
            continue;
        }
        if (!ref.feasible) {
            ++infeasible;
            continue;
        }
        ++feasible;
        const double diff = std::abs(s.objective - ref.objective);
        worst = std::max(worst, diff);
        if (diff > 1e-6) {
            o.fail(fmt::format("instance {}: objective {:.10g} vs enumeration {:.10g}", instance, s.objective,
                               ref.objective));
        }
    }
    if (feasible < 20) o.fail(fmt::format("only {} feasible instances", feasible));
    if (o.pass) {
        o.detail = fmt::format("{} instances (+{} infeasible agreed), {} patterns, worst gap {:.2e}", feasible,
                               infeasible, patterns, worst);
    }
    return o;
}

// ------------------------------------------------------------------ C5

double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Outcome linearisation_exactness() {
    Outcome o;
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto between = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
    const std::vector<double> factors{0.9, 1.0, 1.1};
    double nominal_worst[3] = {0.0, 0.0, 0.0};
    double perturbed_worst[3] = {0.0, 0.0, 0.0};

    for (int i = 0; i < 100; ++i) {
        CompressorParams cp;
        cp.density = between(0.7, 0.9);
        cp.isentropic_efficiency = between(0.6, 0.85);
        cp.heat_capacity_ratio = between(1.2, 1.4);
        cp.compressibility = between(0.85, 1.0);
        cp.gas_constant = between(400.0, 520.0);
        cp.inlet_temperature = between(280.0, 330.0);
        const double q = between(1.0, 60.0);
        const double p_in = between(1.0, 8.0);
        const double p_out = p_in * between(1.5, 10.0);
        const auto coeff = physics::compressor_coefficients(cp);
        const physics::CompressorNominal nominal{q, p_in, p_out};
        auto truth = [&](double qq, double a, double b) {
            return oracle::compressor_power(qq, a, b, cp.density, cp.isentropic_efficiency,
                                            cp.heat_capacity_ratio, cp.compressibility, cp.gas_constant,
                                            cp.inlet_temperature);
        };
        nominal_worst[0] = std::max(
            nominal_worst[0], relative(physics::compressor_power_linearized(q, p_in, p_out, nominal, coeff),
                                       truth(q, p_in, p_out)));
        for (double fi : factors)
            for (double fo : factors) {
                const double lin = physics::compressor_power_linearized(q, p_in * fi, p_out * fo, nominal, coeff);
                perturbed_worst[0] = std::max(perturbed_worst[0], relative(lin, truth(q, p_in * fi, p_out * fo)));
            }
    }

    for (int i = 0; i < 100; ++i) {
        const double d = between(200.0, 1000.0);
        const double len = between(10.0, 100.0);
        const double z1 = between(0.0, 200.0);
        const double z2 = between(0.0, 200.0);
        const double sg = between(0.55, 0.75);
        const double temp = between(280.0, 320.0);
        const double z = between(0.8, 0.95);
        const double p1 = between(5.0, 20.0);
        const double p2 = p1 * between(0.3, 0.6);
        const auto pipe = physics::weymouth_pipe(d, len, z1, z2, 288.0, 0.101, sg, temp, z);
        auto truth = [&](double a, double b) {
            return oracle::weymouth_flow(a, b, d, len, z1, z2, 288.0, 0.101, sg, temp, z);
        };
        nominal_worst[1] = std::max(
            nominal_worst[1], relative(physics::weymouth_flow_linearized(p1, p2, pipe, p1, p2), truth(p1, p2)));
        for (double f1 : factors)
            for (double f2 : factors) {
                const double lin = physics::weymouth_flow_linearized(p1 * f1, p2 * f2, pipe, p1, p2);
                perturbed_worst[1] = std::max(perturbed_worst[1], relative(lin, truth(p1 * f1, p2 * f2)));
            }
    }

    for (int i = 0; i < 100;) {
        const double d = between(100.0, 500.0);
        const double len = between(1.0, 20.0);
        const double fr = between(0.01, 0.03);
        const double rho = between(800.0, 1050.0);
        const double z1 = between(-50.0, 50.0);
        const double z2 = between(-50.0, 50.0);
        const double p1 = between(2.0, 20.0);
        const double p2 = p1 * between(0.0, 0.5);
        const auto pipe = physics::darcy_pipe(d, len, fr, rho, z1, z2);
        if (p1 - p2 - pipe.elevation_head <= 0.0) continue;
        ++i;
        const auto lin = physics::linearize_darcy(pipe, p1, p2);
        auto truth = [&](double a, double b) { return oracle::darcy_flow(a, b, d, len, fr, rho, z1, z2); };
        nominal_worst[2] =
            std::max(nominal_worst[2], relative(physics::darcy_flow_linearized(p1, p2, lin), truth(p1, p2)));
        for (double f1 : factors)
            for (double f2 : factors) {
                perturbed_worst[2] = std::max(
                    perturbed_worst[2],
                    relative(physics::darcy_flow_linearized(p1 * f1, p2 * f2, lin), truth(p1 * f1, p2 * f2)));
            }
    }

    const char* names[3] = {"compressor", "weymouth", "darcy"};
    for (int i = 0; i < 3; ++i) {
        if (nominal_worst[i] > 1e-9) o.fail(fmt::format("{} nominal error {:.2e}", names[i], nominal_worst[i]));
        if (perturbed_worst[i] > 0.05) {
            o.fail(fmt::format("{} error {:.2f}% under 10% perturbation", names[i], 100.0 * perturbed_worst[i]));
        }
    }
    if (o.pass) {
        o.detail = fmt::format("nominal {:.1e}/{:.1e}/{:.1e}, perturbed {:.2f}%/{:.2f}%/{:.2f}%",
                               nominal_worst[0], nominal_worst[1], nominal_worst[2], 100 * perturbed_worst[0],
                               100 * perturbed_worst[1], 100 * perturbed_worst[2]);
    }
    return o;
}

// ------------------------------------------------------------------ C6

Outcome conservation() {
    Outcome o;
    double worst = 0.0;
    int rows = 0;
    for (const char* name : {"reserve_day.yaml", "reserve_day_battery.yaml", "base.yaml", "case_a.yaml",
                             "case_b.yaml", "case_c.yaml"}) {
        const auto& run = fixture_run(name);
        const auto report = conservation_audit(run.result, run.doc.model, run.doc.config);
        rows += report.checked_rows;
        worst = std::max(worst, report.max_residual());
        if (report.max_residual() >= 1e-6) {
            o.fail(fmt::format("{}: residual {:.2e} at {}{}", name, report.max_residual(),
                               report.worst_balance, report.worst_storage));
        }
    }
    if (o.pass) o.detail = fmt::format("6 fixture runs, {} rows checked, worst residual {:.2e}", rows, worst);
    return o;
}

// ------------------------------------------------------------------ C7

Outcome well_split_identity() {
    Outcome o;
    std::mt19937_64 rng(1000);
    std::uniform_real_distribution<double> gor(0.0, 5000.0);
    std::uniform_real_distribution<double> wc(0.0, 0.999);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto s = physics::well_split(gor(rng), wc(rng));
        worst = std::max(worst, std::abs(s.water + s.oil + s.gas - 1.0));
    }
    if (worst > 1e-12) o.fail(fmt::format("fractions off by {:.2e}", worst));
    const auto leogo = physics::well_split(500.0, 0.6);
    const auto ref = oracle::wellstream_fractions(500.0, 0.6);
    if (std::abs(leogo.water - ref.water) > 1e-12 || std::abs(leogo.oil - ref.oil) > 1e-12 ||
        std::abs(leogo.gas - ref.gas) > 1e-12 || std::abs(leogo.water - 2.9851e-3) > 1e-7 ||
        std::abs(leogo.oil - 1.9900e-3) > 1e-7 || std::abs(leogo.gas - 0.995025) > 1e-6) {
        o.fail(fmt::format("GOR 500, water cut 0.6 gives {:.6g}/{:.6g}/{:.6g}", leogo.water, leogo.oil,
                           leogo.gas));
    }
    if (o.pass) {
        o.detail = fmt::format("1000 draws, worst sum error {:.1e}; water {:.4e} oil {:.4e} gas {:.6f}", worst,
                               leogo.water, leogo.oil, leogo.gas);
    }
    return o;
}

// ------------------------------------------------------------------ C8

Outcome determinism() {
    Outcome o;
    const auto root = fs::temp_directory_path() / "platopt_acceptance_determinism";
    fs::remove_all(root);
    const auto config = build::fixture("reserve_day.yaml").string();
    for (const char* run : {"one", "two"}) {
        std::ostringstream out, err;
        const int code = run_cli({"simulate", "--config", config, "--out", (root / run).string(), "--quiet"},
                                 out, err);
        if (code != 0) {
            o.fail(fmt::format("simulate exited {}: {}", code, err.str()));
            return o;
        }
    }
    int files = 0;
    for (const auto& entry : fs::directory_iterator(root / "one")) {
        const auto name = entry.path().filename();
        ++files;
        if (!fs::exists(root / "two" / name)) {
            o.fail(fmt::format("{} missing in second bundle", name.string()));
        } else if (read_text_file(entry.path()) != read_text_file(root / "two" / name)) {
            o.fail(fmt::format("{} differs", name.string()));
        }
    }
    if (o.pass) o.detail = fmt::format("{} files byte-identical", files);
    fs::remove_all(root);
    return o;
}

// ------------------------------------------------------------------ C9

Outcome base_constancy() {
    Outcome o;
    const auto& run = fixture_run("base.yaml");
    const auto series = emission_series(run.result, run.doc.model);
    const auto skip = static_cast<std::size_t>(run.doc.config.reoptimisation_steps);
    if (series.size() <= skip + 1) {
        o.fail("series too short");
        return o;
    }
    double sum = 0.0, sq = 0.0;
    const double n = static_cast<double>(series.size() - skip);
    for (std::size_t t = skip; t < series.size(); ++t) sum += series[t];
    const double mean = sum / n;
    for (std::size_t t = skip; t < series.size(); ++t) sq += (series[t] - mean) * (series[t] - mean);
    const double cv = std::sqrt(sq / n) / mean;
    if (!(cv < 0.01)) o.fail(fmt::format("coefficient of variation {:.3f}%", 100.0 * cv));
    if (o.pass) o.detail = fmt::format("mean {:.4f} kg/s, coefficient of variation {:.4f}%", mean, 100.0 * cv);
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"C1 start-stop state machine", start_stop_exhaustive},
        {"C2 reserve threshold", reserve_threshold},
        {"C3 battery reserve substitution", battery_substitution},
        {"C4 MILP vs enumeration", milp_vs_enumeration},
        {"C5 linearisation exactness", linearisation_exactness},
        {"C6 conservation", conservation},
        {"C7 well split identity", well_split_identity},
        {"C8 determinism", determinism},
        {"C9 base-case constancy", base_constancy},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.fail(fmt::format("exception: {}", e.what()));
        }
        failures += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
