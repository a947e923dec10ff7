#pragma once

// Test-side reference implementations. Nothing here calls into the solver
// backend; the formulas are written from the physical relations directly.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "platopt/lp.hpp"

namespace oracle {

// ------------------------------------------------------------ dense simplex

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
};

/// Two-phase dense tableau simplex with Bland's rule. Uses the rows and
/// objective of `model` with the variable bounds given here (binaries are
/// treated as continuous within their bounds).
LpResult solve_dense_lp(const platopt::MilpModel& model, std::span<const double> lower,
                        std::span<const double> upper);

struct EnumerationResult {
    bool feasible = false;
    double objective = 0.0;
    std::vector<double> x;
    std::uint64_t patterns = 0;  // binary assignments visited
    std::uint64_t lps = 0;       // LPs solved
};

/// Minimum over every 0/1 assignment of the binaries of the LP with those
/// binaries fixed. Assignments violating a row that contains only binaries
/// are skipped without an LP (the LP would be infeasible).
EnumerationResult enumerate_binaries(const platopt::MilpModel& model);

// -------------------------------------------------------- start-stop logic

struct StartStopTrace {
    bool valid = true;
    std::vector<int> on;
    std::vector<int> prep;
};

/// Unit with start-up delay `delay`: a start at k keeps the unit preparing
/// on k .. k+delay-1 and brings it online at k+delay; a stop takes it
/// offline at once. `valid` is false when the sequence would leave the unit
/// online twice, offline twice, or preparing two starts at the same time.
StartStopTrace start_stop_machine(int delay, int on_before, const std::vector<int>& start,
                                  const std::vector<int>& stop);

/// Fill the unknown variables of `values` (NaN entries) from equality rows
/// that have exactly one unknown, repeatedly. Returns the number still unknown.
int propagate_equalities(const platopt::MilpModel& model, std::vector<double>& values);

// ------------------------------------------------------------------ physics

/// Adiabatic compression power (MW) of an ideal gas, from raw parameters.
/// q in Sm3/s, pressures in MPa, density kg/Sm3, R in J/(kg K), T in K.
double compressor_power(double q, double p_in, double p_out, double density, double efficiency,
                        double k, double z, double r, double t_inlet);

/// Weymouth flow (Sm3/s) with the elevation correction; diameter in mm,
/// length in km, pressures in MPa, elevations in m.
double weymouth_flow(double p1, double p2, double diameter_mm, double length_km, double z1,
                     double z2, double base_temperature, double base_pressure, double gravity,
                     double gas_temperature, double compressibility);

/// Darcy-Weisbach liquid flow (m3/s) driven by p1 - p2 (MPa) less the static head.
double darcy_flow(double p1, double p2, double diameter_mm, double length_km, double friction,
                  double density, double z1, double z2);

/// Volume fractions of water, oil and gas in a wellstream with gas-oil ratio
/// `gor` (Sm3 gas per Sm3 oil) and water cut `wc` (water per liquid).
struct Fractions {
    double water, oil, gas;
};
Fractions wellstream_fractions(double gor, double wc);

}  // namespace oracle
