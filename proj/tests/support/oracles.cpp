#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace oracle {

using platopt::MilpModel;

namespace {

constexpr double kEps = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { Le, Ge, Eq };

struct Row {
    std::vector<double> a;  // over the shifted columns
    Sense sense;
    double rhs;
};

// x_j = offset + sum coef * y_col
struct Mapping {
    double offset = 0.0;
    std::vector<std::pair<int, double>> cols;
};

class Tableau {
public:
    Tableau(int rows, int cols) : m_(rows), n_(cols), t_((rows + 1) * (cols + 1), 0.0) {}

    double& at(int i, int j) { return t_[static_cast<std::size_t>(i * (n_ + 1) + j)]; }
    double& rhs(int i) { return at(i, n_); }
    double& obj(int j) { return at(m_, j); }

    void pivot(int r, int c) {
        const double p = at(r, c);
        for (int j = 0; j <= n_; ++j) at(r, j) /= p;
        for (int i = 0; i <= m_; ++i) {
            if (i == r) continue;
            const double f = at(i, c);
            if (f == 0.0) continue;
            for (int j = 0; j <= n_; ++j) at(i, j) -= f * at(r, j);
        }
    }

    // Minimise the objective row; columns >= `limit` may not enter.
    // Returns false when unbounded.
    bool run(std::vector<int>& basis, int limit) {
        for (int iter = 0; iter < 100000; ++iter) {
            int enter = -1;
            for (int j = 0; j < limit; ++j) {
                if (obj(j) < -kEps) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;
            int leave = -1;
            double best = kInf;
            for (int i = 0; i < m_; ++i) {
                const double a = at(i, enter);
                if (a <= kEps) continue;
                const double ratio = rhs(i) / a;
                if (ratio < best - 1e-12 ||
                    (std::abs(ratio - best) <= 1e-12 && basis[i] < basis[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
            basis[leave] = enter;
        }
        throw std::runtime_error("dense simplex did not terminate");
    }

    int rows() const { return m_; }
    int cols() const { return n_; }

private:
    int m_;
    int n_;
    std::vector<double> t_;
};

}  // namespace

LpResult solve_dense_lp(const MilpModel& model, std::span<const double> lower,
                        std::span<const double> upper) {
    const auto& vars = model.variables();
    const std::size_t nv = vars.size();

    // shift every variable onto y >= 0
    std::vector<Mapping> map(nv);
    std::vector<Row> rows;
    int ny = 0;
    for (std::size_t j = 0; j < nv; ++j) {
        const double lo = lower[j];
        const double hi = upper[j];
        if (lo > hi + kEps) return {LpStatus::Infeasible, 0.0, {}};
        if (std::isfinite(lo)) {
            map[j] = {lo, {{ny, 1.0}}};
            if (std::isfinite(hi)) {
                Row r{std::vector<double>(static_cast<std::size_t>(ny) + 1, 0.0), Sense::Le,
                      hi - lo};
                r.a[static_cast<std::size_t>(ny)] = 1.0;
                rows.push_back(std::move(r));
            }
            ++ny;
        } else if (std::isfinite(hi)) {
            map[j] = {hi, {{ny, -1.0}}};
            ++ny;
        } else {
            map[j] = {0.0, {{ny, 1.0}, {ny + 1, -1.0}}};
            ny += 2;
        }
    }

    auto expand = [&](const platopt::LinearExpr& e, double& constant) {
        std::vector<double> a(static_cast<std::size_t>(ny), 0.0);
        constant = e.constant();
        for (const auto& t : e.terms()) {
            const auto& m = map[static_cast<std::size_t>(t.var.index)];
            constant += t.coef * m.offset;
            for (const auto& [col, c] : m.cols) a[static_cast<std::size_t>(col)] += t.coef * c;
        }
        return a;
    };

    for (auto& r : rows) r.a.resize(static_cast<std::size_t>(ny), 0.0);
    for (const auto& c : model.constraints()) {
        double constant = 0.0;
        auto a = expand(c.expr, constant);
        if (c.lower == c.upper) {
            rows.push_back({a, Sense::Eq, c.lower - constant});
            continue;
        }
        if (std::isfinite(c.lower)) rows.push_back({a, Sense::Ge, c.lower - constant});
        if (std::isfinite(c.upper)) rows.push_back({a, Sense::Le, c.upper - constant});
    }
    double obj_constant = 0.0;
    const auto cost = expand(model.objective(), obj_constant);

    for (auto& r : rows) {
        if (r.rhs < 0.0) {
            for (auto& v : r.a) v = -v;
            r.rhs = -r.rhs;
            if (r.sense == Sense::Le) r.sense = Sense::Ge;
            else if (r.sense == Sense::Ge) r.sense = Sense::Le;
        }
    }

    const int m = static_cast<int>(rows.size());
    int n_slack = 0;
    int n_art = 0;
    for (const auto& r : rows) {
        if (r.sense != Sense::Eq) ++n_slack;
        if (r.sense != Sense::Le) ++n_art;
    }
    const int first_slack = ny;
    const int first_art = ny + n_slack;
    const int n = first_art + n_art;
    Tableau t(m, n);
    std::vector<int> basis(static_cast<std::size_t>(m), -1);
    int s = first_slack;
    int art = first_art;
    for (int i = 0; i < m; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        for (int j = 0; j < ny; ++j) t.at(i, j) = r.a[static_cast<std::size_t>(j)];
        t.rhs(i) = r.rhs;
        if (r.sense == Sense::Le) {
            t.at(i, s) = 1.0;
            basis[static_cast<std::size_t>(i)] = s++;
        } else {
            if (r.sense == Sense::Ge) t.at(i, s++) = -1.0;
            t.at(i, art) = 1.0;
            basis[static_cast<std::size_t>(i)] = art++;
        }
    }

    // phase 1: minimise the sum of artificials
    for (int i = 0; i < m; ++i) {
        if (basis[static_cast<std::size_t>(i)] < first_art) continue;
        for (int j = 0; j <= n; ++j) {
            if (j < first_art || j == n) t.at(m, j) -= t.at(i, j);
        }
    }
    t.run(basis, first_art);
    if (-t.rhs(m) > 1e-7) return {LpStatus::Infeasible, 0.0, {}};
    // drive remaining artificials out of the basis where possible
    for (int i = 0; i < m; ++i) {
        if (basis[static_cast<std::size_t>(i)] < first_art) continue;
        for (int j = 0; j < first_art; ++j) {
            if (std::abs(t.at(i, j)) > kEps) {
                t.pivot(i, j);
                basis[static_cast<std::size_t>(i)] = j;
                break;
            }
        }
    }

    // phase 2
    for (int j = 0; j <= n; ++j) t.obj(j) = 0.0;
    for (int j = 0; j < ny; ++j) t.obj(j) = cost[static_cast<std::size_t>(j)];
    for (int i = 0; i < m; ++i) {
        const int b = basis[static_cast<std::size_t>(i)];
        const double cb = t.obj(b);
        if (cb == 0.0) continue;
        for (int j = 0; j <= n; ++j) t.obj(j) -= cb * t.at(i, j);
    }
    if (!t.run(basis, first_art)) return {LpStatus::Unbounded, 0.0, {}};

    std::vector<double> y(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < m; ++i) y[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])] = t.rhs(i);
    LpResult out;
    out.status = LpStatus::Optimal;
    out.x.resize(nv);
    for (std::size_t j = 0; j < nv; ++j) {
        double v = map[j].offset;
        for (const auto& [col, c] : map[j].cols) v += c * y[static_cast<std::size_t>(col)];
        out.x[j] = v;
    }
    out.objective = model.objective().evaluate(out.x);
    return out;
}

EnumerationResult enumerate_binaries(const MilpModel& model) {
    const auto& vars = model.variables();
    std::vector<std::size_t> binaries;
    std::vector<int> position(vars.size(), -1);
    for (std::size_t j = 0; j < vars.size(); ++j) {
        if (vars[j].kind == platopt::VarKind::Binary) {
            position[j] = static_cast<int>(binaries.size());
            binaries.push_back(j);
        }
    }
    if (binaries.size() > 24) throw std::invalid_argument("too many binaries to enumerate");

    std::vector<const platopt::Constraint*> pure;
    for (const auto& c : model.constraints()) {
        bool only_binary = !c.expr.terms().empty();
        for (const auto& t : c.expr.terms()) {
            if (position[static_cast<std::size_t>(t.var.index)] < 0) only_binary = false;
        }
        if (only_binary) pure.push_back(&c);
    }

    std::vector<double> lower(vars.size());
    std::vector<double> upper(vars.size());
    for (std::size_t j = 0; j < vars.size(); ++j) {
        lower[j] = vars[j].lower;
        upper[j] = vars[j].upper;
    }

    EnumerationResult best;
    const std::uint64_t count = std::uint64_t{1} << binaries.size();
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        ++best.patterns;
        for (std::size_t b = 0; b < binaries.size(); ++b) {
            const double v = (mask >> b) & 1U ? 1.0 : 0.0;
            lower[binaries[b]] = v;
            upper[binaries[b]] = v;
        }
        bool ok = true;
        for (const auto* c : pure) {
            double v = c->expr.constant();
            for (const auto& t : c->expr.terms()) v += t.coef * lower[static_cast<std::size_t>(t.var.index)];
            if (v < c->lower - kEps || v > c->upper + kEps) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        ++best.lps;
        const auto lp = solve_dense_lp(model, lower, upper);
        if (lp.status == LpStatus::Unbounded) throw std::runtime_error("enumerated LP is unbounded");
        if (lp.status != LpStatus::Optimal) continue;
        if (!best.feasible || lp.objective < best.objective) {
            best.feasible = true;
            best.objective = lp.objective;
            best.x = lp.x;
        }
    }
    return best;
}

StartStopTrace start_stop_machine(int delay, int on_before, const std::vector<int>& start,
                                  const std::vector<int>& stop) {
    StartStopTrace trace;
    const int n = static_cast<int>(start.size());
    int online = on_before;
    std::vector<int> started_at;
    for (int k = 0; k < n; ++k) {
        if (start[static_cast<std::size_t>(k)]) started_at.push_back(k);
        int preparing = 0;
        int landing = 0;
        for (int s : started_at) {
            if (k - s < delay) ++preparing;
            if (k - s == delay) ++landing;
        }
        online += landing;
        if (stop[static_cast<std::size_t>(k)]) online -= 1;
        if (online < 0 || online > 1 || preparing > 1) trace.valid = false;
        trace.on.push_back(online);
        trace.prep.push_back(preparing);
    }
    return trace;
}

int propagate_equalities(const MilpModel& model, std::vector<double>& values) {
    bool progress = true;
    while (progress) {
        progress = false;
        for (const auto& c : model.constraints()) {
            if (!c.is_equality()) continue;
            int unknown = -1;
            int unknown_count = 0;
            double coef = 0.0;
            double known = c.expr.constant();
            for (const auto& t : c.expr.terms()) {
                const double v = values[static_cast<std::size_t>(t.var.index)];
                if (std::isnan(v)) {
                    if (unknown != t.var.index) ++unknown_count;
                    unknown = t.var.index;
                    coef += t.coef;
                } else {
                    known += t.coef * v;
                }
            }
            if (unknown_count != 1 || coef == 0.0) continue;
            values[static_cast<std::size_t>(unknown)] = (c.lower - known) / coef;
            progress = true;
        }
    }
    int missing = 0;
    for (double v : values) missing += std::isnan(v) ? 1 : 0;
    return missing;
}

double compressor_power(double q, double p_in, double p_out, double density, double efficiency,
                        double k, double z, double r, double t_inlet) {
    // specific work per standard volume, J/Sm3
    const double exponent = (k - 1.0) / k;
    const double work = density * z * r * t_inlet / (efficiency * (k - 1.0)) *
                        (std::pow(p_out / p_in, exponent) - 1.0);
    return work * q / 1e6;
}

double weymouth_flow(double p1, double p2, double diameter_mm, double length_km, double z1,
                     double z2, double base_temperature, double base_pressure, double gravity,
                     double gas_temperature, double compressibility) {
    const double s = 0.0684 * gravity * (z2 - z1) / (gas_temperature * compressibility);
    // equivalent length tends to L as the elevation difference vanishes
    const double le = std::abs(s) < 1e-12 ? length_km : length_km * (std::exp(s) - 1.0) / s;
    const double k = 4.3328e-8 * (base_temperature / base_pressure) *
                     std::pow(diameter_mm, 8.0 / 3.0) /
                     std::sqrt(gravity * gas_temperature * le * compressibility);
    return k * std::sqrt(p1 * p1 - std::exp(s) * p2 * p2);
}

double darcy_flow(double p1, double p2, double diameter_mm, double length_km, double friction,
                  double density, double z1, double z2) {
    const double d = diameter_mm / 1000.0;
    const double length = length_km * 1000.0;
    const double friction_drop = (p1 - p2) * 1e6 - density * 9.81 * (z2 - z1);  // Pa
    const double velocity = std::sqrt(2.0 * d * friction_drop / (friction * density * length));
    return velocity * std::numbers::pi * d * d / 4.0;
}

Fractions wellstream_fractions(double gor, double wc) {
    // per unit of oil: water wc/(1-wc), gas gor
    const double water = wc / (1.0 - wc);
    const double total = 1.0 + water + gor;
    return {water / total, 1.0 / total, gor / total};
}

}  // namespace oracle
