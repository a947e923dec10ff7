#pragma once

// Solver-independent representation of a mixed-integer linear program:
// a registry of named variables, range constraints over linear expressions,
// and a linear objective.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace platopt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct VarId {
    int index = -1;
    bool valid() const { return index >= 0; }
    auto operator<=>(const VarId&) const = default;
};

/// sum_i coef_i x_i + constant
class LinearExpr {
public:
    struct Term {
        VarId var;
        double coef = 0.0;
    };

    LinearExpr() = default;
    LinearExpr(double constant) : constant_(constant) {}  // NOLINT: implicit by design of expressions
    LinearExpr(VarId var, double coef = 1.0) { add(var, coef); }  // NOLINT

    LinearExpr& add(VarId var, double coef);
    LinearExpr& add(const LinearExpr& other, double scale = 1.0);
    LinearExpr& add_constant(double c) {
        constant_ += c;
        return *this;
    }

    const std::vector<Term>& terms() const { return terms_; }
    double constant() const { return constant_; }
    bool is_constant() const { return terms_.empty(); }

    /// Merge duplicate variables and drop zero coefficients; sorted by index.
    LinearExpr normalized() const;

    double evaluate(std::span<const double> values) const;

    LinearExpr& operator+=(const LinearExpr& o) { return add(o, 1.0); }
    LinearExpr& operator-=(const LinearExpr& o) { return add(o, -1.0); }
    LinearExpr& operator*=(double s);

private:
    std::vector<Term> terms_;
    double constant_ = 0.0;
};

LinearExpr operator+(LinearExpr a, const LinearExpr& b);
LinearExpr operator-(LinearExpr a, const LinearExpr& b);
LinearExpr operator-(LinearExpr a);
LinearExpr operator*(double s, LinearExpr a);
LinearExpr operator*(LinearExpr a, double s);

/// lower <= expr <= upper
struct Constraint {
    std::string name;
    LinearExpr expr;
    double lower = -kInf;
    double upper = kInf;

    bool is_equality() const { return lower == upper; }
};

Constraint equal(std::string name, LinearExpr lhs, const LinearExpr& rhs);
Constraint less_equal(std::string name, LinearExpr lhs, const LinearExpr& rhs);
Constraint greater_equal(std::string name, LinearExpr lhs, const LinearExpr& rhs);

using ConstraintSet = std::vector<Constraint>;

enum class VarKind { Continuous, Binary };

struct Variable {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lower = 0.0;
    double upper = kInf;
};

class MilpModel {
public:
    VarId add_variable(std::string name, VarKind kind, double lower, double upper);
    VarId add_continuous(std::string name, double lower = 0.0, double upper = kInf) {
        return add_variable(std::move(name), VarKind::Continuous, lower, upper);
    }
    VarId add_binary(std::string name) {
        return add_variable(std::move(name), VarKind::Binary, 0.0, 1.0);
    }

    void add_constraint(Constraint c);
    void add_constraints(ConstraintSet set);

    void add_objective(const LinearExpr& e, double scale = 1.0) { objective_.add(e, scale); }

    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const LinearExpr& objective() const { return objective_; }
    const Variable& variable(VarId v) const { return variables_.at(static_cast<std::size_t>(v.index)); }
    std::size_t binary_count() const;

    /// Fix a variable's bounds (used to pin history or oracle enumeration).
    void fix(VarId v, double value);

private:
    std::vector<Variable> variables_;
    std::vector<Constraint> constraints_;
    LinearExpr objective_;
};

struct Violation {
    std::string name;
    double residual = 0.0;
};

/// Direct substitution of values into every row and bound. Returns the rows
/// or bounds whose residual exceeds the tolerance.
std::vector<Violation> check_solution(const MilpModel& model, std::span<const double> values,
                                      double tolerance = 1e-6);

/// Largest residual over all rows and variable bounds (0 when feasible).
double max_residual(const MilpModel& model, std::span<const double> values);

enum class ExportFormat { Lp, Mps };

void write_lp(const MilpModel& model, std::ostream& out, const std::string& name = "platopt");
void write_mps(const MilpModel& model, std::ostream& out, const std::string& name = "platopt");
void export_problem(const MilpModel& model, ExportFormat format, const std::string& path);

}  // namespace platopt
