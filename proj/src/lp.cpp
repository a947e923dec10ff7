#include "platopt/lp.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include "platopt/errors.hpp"

namespace platopt {

LinearExpr& LinearExpr::add(VarId var, double coef) {
    if (coef != 0.0) terms_.push_back({var, coef});
    return *this;
}

LinearExpr& LinearExpr::add(const LinearExpr& other, double scale) {
    for (const auto& t : other.terms_) add(t.var, scale * t.coef);
    constant_ += scale * other.constant_;
    return *this;
}

LinearExpr& LinearExpr::operator*=(double s) {
    for (auto& t : terms_) t.coef *= s;
    constant_ *= s;
    return *this;
}

LinearExpr LinearExpr::normalized() const {
    std::map<int, double> merged;
    for (const auto& t : terms_) merged[t.var.index] += t.coef;
    LinearExpr out(constant_);
    for (const auto& [index, coef] : merged) {
        if (coef != 0.0) out.terms_.push_back({VarId{index}, coef});
    }
    return out;
}

double LinearExpr::evaluate(std::span<const double> values) const {
    double sum = constant_;
    for (const auto& t : terms_) sum += t.coef * values[static_cast<std::size_t>(t.var.index)];
    return sum;
}

LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a -= b; }
LinearExpr operator-(LinearExpr a) { return a *= -1.0; }
LinearExpr operator*(double s, LinearExpr a) { return a *= s; }
LinearExpr operator*(LinearExpr a, double s) { return a *= s; }

namespace {

Constraint make_row(std::string name, LinearExpr lhs, const LinearExpr& rhs, double lo,
                    double hi) {
    lhs -= rhs;
    LinearExpr expr = lhs.normalized();
    const double c = expr.constant();
    expr.add_constant(-c);
    return {std::move(name), std::move(expr), lo - c, hi - c};
}

}  // namespace

Constraint equal(std::string name, LinearExpr lhs, const LinearExpr& rhs) {
    return make_row(std::move(name), std::move(lhs), rhs, 0.0, 0.0);
}

Constraint less_equal(std::string name, LinearExpr lhs, const LinearExpr& rhs) {
    return make_row(std::move(name), std::move(lhs), rhs, -kInf, 0.0);
}

Constraint greater_equal(std::string name, LinearExpr lhs, const LinearExpr& rhs) {
    return make_row(std::move(name), std::move(lhs), rhs, 0.0, kInf);
}

VarId MilpModel::add_variable(std::string name, VarKind kind, double lower, double upper) {
    variables_.push_back({std::move(name), kind, lower, upper});
    return VarId{static_cast<int>(variables_.size()) - 1};
}

void MilpModel::add_constraint(Constraint c) {
    for (const auto& t : c.expr.terms()) {
        if (t.var.index < 0 || static_cast<std::size_t>(t.var.index) >= variables_.size()) {
            throw AssemblyError("constraint '" + c.name + "' references an unregistered variable");
        }
    }
    constraints_.push_back(std::move(c));
}

void MilpModel::add_constraints(ConstraintSet set) {
    for (auto& c : set) add_constraint(std::move(c));
}

std::size_t MilpModel::binary_count() const {
    return static_cast<std::size_t>(std::count_if(
        variables_.begin(), variables_.end(),
        [](const Variable& v) { return v.kind == VarKind::Binary; }));
}

void MilpModel::fix(VarId v, double value) {
    auto& var = variables_.at(static_cast<std::size_t>(v.index));
    var.lower = value;
    var.upper = value;
}

std::vector<Violation> check_solution(const MilpModel& model, std::span<const double> values,
                                      double tolerance) {
    std::vector<Violation> out;
    const auto& vars = model.variables();
    if (values.size() != vars.size()) {
        out.push_back({"<value count>", kInf});
        return out;
    }
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const double x = values[i];
        double r = std::max(vars[i].lower - x, x - vars[i].upper);
        if (vars[i].kind == VarKind::Binary) {
            r = std::max(r, std::abs(x - std::round(x)));
        }
        if (r > tolerance) out.push_back({vars[i].name, r});
    }
    for (const auto& c : model.constraints()) {
        const double v = c.expr.evaluate(values);
        const double r = std::max(c.lower - v, v - c.upper);
        if (r > tolerance) out.push_back({c.name, r});
    }
    return out;
}

double max_residual(const MilpModel& model, std::span<const double> values) {
    double worst = 0.0;
    const auto& vars = model.variables();
    for (std::size_t i = 0; i < vars.size() && i < values.size(); ++i) {
        worst = std::max({worst, vars[i].lower - values[i], values[i] - vars[i].upper});
    }
    for (const auto& c : model.constraints()) {
        const double v = c.expr.evaluate(values);
        worst = std::max({worst, c.lower - v, v - c.upper});
    }
    return worst;
}

// --------------------------------------------------------------------- export

namespace {

std::string num(double v) { return fmt::format("{}", v); }

// LP readers treat section keywords as keywords even where a name is expected.
std::string lp_name(const std::string& name) {
    static const std::set<std::string> keywords{
        "min", "max", "minimize", "maximize", "minimum", "maximum", "st", "s.t.", "such",
        "subject", "bound", "bounds", "bin", "binary", "binaries", "gen", "general", "generals",
        "int", "integer", "integers", "semi", "semis", "sos", "end", "free", "inf", "infinity"};
    std::string lower = name;
    for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return keywords.count(lower) ? name + "_" : name;
}

void write_lp_terms(std::ostream& out, const LinearExpr& expr,
                    const std::vector<Variable>& vars) {
    int on_line = 0;
    for (const auto& t : expr.terms()) {
        if (on_line == 6) {
            out << "\n   ";
            on_line = 0;
        }
        out << (t.coef < 0 ? " - " : " + ") << num(std::abs(t.coef)) << ' '
            << lp_name(vars[static_cast<std::size_t>(t.var.index)].name);
        ++on_line;
    }
}

}  // namespace

void write_lp(const MilpModel& model, std::ostream& out, const std::string& name) {
    const auto& vars = model.variables();
    out << "\\ Problem: " << name << "\n";
    out << "Minimize\n obj:";
    const LinearExpr objective = model.objective().normalized();
    write_lp_terms(out, objective, vars);
    if (objective.constant() != 0.0) {
        out << (objective.constant() < 0 ? " - " : " + ") << num(std::abs(objective.constant()));
    } else if (objective.terms().empty()) {
        out << " 0";
    }
    out << "\nSubject To\n";
    for (const auto& c : model.constraints()) {
        auto row = [&](const std::string& row_name, const char* sense, double rhs) {
            out << ' ' << lp_name(row_name) << ':';
            if (c.expr.terms().empty()) {
                out << " 0 " << (vars.empty() ? "" : lp_name(vars.front().name));
            }
            write_lp_terms(out, c.expr, vars);
            out << ' ' << sense << ' ' << num(rhs) << "\n";
        };
        if (c.is_equality()) {
            row(c.name, "=", c.lower);
        } else if (std::isfinite(c.lower) && std::isfinite(c.upper)) {
            row(c.name + "_lo", ">=", c.lower);
            row(c.name + "_hi", "<=", c.upper);
        } else if (std::isfinite(c.lower)) {
            row(c.name, ">=", c.lower);
        } else if (std::isfinite(c.upper)) {
            row(c.name, "<=", c.upper);
        }
    }
    out << "Bounds\n";
    for (const auto& v : vars) {
        const bool binary = v.kind == VarKind::Binary;
        if (binary && v.lower == 0.0 && v.upper == 1.0) continue;
        if (v.lower == v.upper) {
            out << ' ' << lp_name(v.name) << " = " << num(v.lower) << "\n";
        } else if (!std::isfinite(v.lower) && !std::isfinite(v.upper)) {
            out << ' ' << lp_name(v.name) << " free\n";
        } else {
            out << ' ' << (std::isfinite(v.lower) ? num(v.lower) : "-inf") << " <= " << lp_name(v.name)
                << " <= " << (std::isfinite(v.upper) ? num(v.upper) : "+inf") << "\n";
        }
    }
    std::vector<const Variable*> binaries;
    std::vector<const Variable*> generals;
    for (const auto& v : vars) {
        if (v.kind != VarKind::Binary) continue;
        (v.lower == 0.0 && v.upper == 1.0 ? binaries : generals).push_back(&v);
    }
    if (!binaries.empty()) {
        out << "Binary\n";
        for (const auto* v : binaries) out << ' ' << lp_name(v->name) << "\n";
    }
    if (!generals.empty()) {
        // fixed binaries keep their bounds as general integers
        out << "General\n";
        for (const auto* v : generals) out << ' ' << lp_name(v->name) << "\n";
    }
    out << "End\n";
}

void write_mps(const MilpModel& model, std::ostream& out, const std::string& name) {
    const auto& vars = model.variables();
    const auto& rows = model.constraints();
    out << "NAME " << name << "\n";
    out << "ROWS\n N obj\n";
    for (const auto& c : rows) {
        const char* sense = c.is_equality() ? "E" : std::isfinite(c.lower) ? "G" : "L";
        if (!std::isfinite(c.lower) && !std::isfinite(c.upper)) sense = "N";
        out << ' ' << sense << ' ' << c.name << "\n";
    }

    // column-major view of the row expressions
    std::vector<std::vector<std::pair<std::size_t, double>>> columns(vars.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (const auto& t : rows[r].expr.terms()) {
            columns[static_cast<std::size_t>(t.var.index)].emplace_back(r, t.coef);
        }
    }
    const LinearExpr objective = model.objective().normalized();
    std::vector<double> cost(vars.size(), 0.0);
    for (const auto& t : objective.terms()) cost[static_cast<std::size_t>(t.var.index)] = t.coef;

    out << "COLUMNS\n";
    bool in_integer_block = false;
    for (std::size_t j = 0; j < vars.size(); ++j) {
        const bool integer = vars[j].kind == VarKind::Binary;
        if (integer != in_integer_block) {
            out << " MARKER 'MARKER' " << (integer ? "'INTORG'" : "'INTEND'") << "\n";
            in_integer_block = integer;
        }
        // every column appears at least once so the reader registers it
        out << ' ' << vars[j].name << " obj " << num(cost[j]) << "\n";
        for (const auto& [r, coef] : columns[j]) {
            out << ' ' << vars[j].name << ' ' << rows[r].name << ' ' << num(coef) << "\n";
        }
    }
    if (in_integer_block) out << " MARKER 'MARKER' 'INTEND'\n";

    out << "RHS\n";
    if (objective.constant() != 0.0) out << " RHS obj " << num(-objective.constant()) << "\n";
    for (const auto& c : rows) {
        double rhs = c.is_equality() || std::isfinite(c.lower) ? c.lower : c.upper;
        if (!std::isfinite(rhs)) continue;
        if (rhs != 0.0) out << " RHS " << c.name << ' ' << num(rhs) << "\n";
    }
    bool ranges_header = false;
    for (const auto& c : rows) {
        if (c.is_equality() || !std::isfinite(c.lower) || !std::isfinite(c.upper)) continue;
        if (!ranges_header) {
            out << "RANGES\n";
            ranges_header = true;
        }
        out << " RNG " << c.name << ' ' << num(c.upper - c.lower) << "\n";
    }
    out << "BOUNDS\n";
    for (const auto& v : vars) {
        if (v.lower == v.upper) {
            out << " FX BND " << v.name << ' ' << num(v.lower) << "\n";
            continue;
        }
        if (v.kind == VarKind::Binary) {
            // integer markers alone would imply [0, inf) in some readers
            out << " LO BND " << v.name << ' ' << num(v.lower) << "\n";
            out << " UP BND " << v.name << ' ' << num(v.upper) << "\n";
            continue;
        }
        if (!std::isfinite(v.lower) && !std::isfinite(v.upper)) {
            out << " FR BND " << v.name << "\n";
            continue;
        }
        if (!std::isfinite(v.lower)) {
            out << " MI BND " << v.name << "\n";
        } else if (v.lower != 0.0) {
            out << " LO BND " << v.name << ' ' << num(v.lower) << "\n";
        }
        if (std::isfinite(v.upper)) out << " UP BND " << v.name << ' ' << num(v.upper) << "\n";
    }
    out << "ENDATA\n";
}

void export_problem(const MilpModel& model, ExportFormat format, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open '" + path + "' for writing");
    if (format == ExportFormat::Lp) {
        write_lp(model, file);
    } else {
        write_mps(model, file);
    }
    if (!file) throw IoError("failed writing '" + path + "'");
}

}  // namespace platopt
