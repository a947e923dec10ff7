#pragma once

// Closed-form device and pipeline relations, and the linearisations the
// constraint generators emit. Pressures are in MPa, fluid flows in Sm3/s
// (m3/s for liquids) and powers in MW.

#include "platopt/model.hpp"

namespace platopt::physics {

inline constexpr double kGravity = 9.81;  // m/s2

// ---------------------------------------------------------------- compressor

/// Adiabatic compression: P = c [(p_out/p_in)^a - 1] q.
struct CompressorCoefficients {
    double c = 0.0;  // MJ/Sm3
    double a = 0.0;  // (k - 1) / k
};

CompressorCoefficients compressor_coefficients(const CompressorParams& params);

double compressor_power_nonlinear(double q, double p_in, double p_out,
                                  const CompressorCoefficients& coeff);

struct CompressorNominal {
    double flow = 0.0;
    double p_in = 0.0;
    double p_out = 0.0;
};

/// P_linear = per_flow q + per_inlet_pressure p_in + per_outlet_pressure p_out
struct CompressorLinearization {
    double per_flow = 0.0;
    double per_inlet_pressure = 0.0;
    double per_outlet_pressure = 0.0;
};

CompressorLinearization linearize_compressor(const CompressorNominal& nominal,
                                             const CompressorCoefficients& coeff);

double compressor_power_linearized(double q, double p_in, double p_out,
                                   const CompressorNominal& nominal,
                                   const CompressorCoefficients& coeff);

// ---------------------------------------------------------------------- pump

double pump_power(double q, double efficiency, double p_in_nominal,
                  double p_out_nominal);

// ---------------------------------------------------------------------- well

/// Fractions of the wellstream flow f leaving as water, oil and net gas.
struct WellSplit {
    double water = 0.0;
    double oil = 0.0;
    double gas = 0.0;
};

WellSplit well_split(double gas_oil_ratio, double water_cut);

// --------------------------------------------------------------- gas turbine

/// Fuel gas draw (Sm3/s) for a given electric output and state.
double gas_turbine_fuel(double el_out, double flow_max, double fuel_a,
                        double fuel_b, double on, double prep, double calorific);

// ------------------------------------------------------------------ weymouth

struct WeymouthPipe {
    double k = 0.0;      // Sm3/(s MPa)
    double s = 0.0;      // elevation exponent
    double exp_s = 1.0;  // e^s
    double equivalent_length_km = 0.0;
};

WeymouthPipe weymouth_pipe(double diameter_mm, double length_km, double z_from,
                           double z_to, double base_temperature,
                           double base_pressure, double gravity,
                           double gas_temperature, double compressibility);

/// q = k sqrt(p1^2 - e^s p2^2)
double weymouth_flow(double p1, double p2, const WeymouthPipe& pipe);

/// q = coef_p1 p1 + coef_p2 p2
struct WeymouthLinearization {
    double coef_p1 = 0.0;
    double coef_p2 = 0.0;
};

WeymouthLinearization linearize_weymouth(const WeymouthPipe& pipe, double p1_nominal,
                                         double p2_nominal);

double weymouth_flow_linearized(double p1, double p2, const WeymouthPipe& pipe,
                                double p1_nominal, double p2_nominal);

// --------------------------------------------------------------------- darcy

struct DarcyPipe {
    double k = 0.0;              // m3/s per sqrt(MPa)
    double elevation_head = 0.0; // rho g (z2 - z1) in MPa
};

DarcyPipe darcy_pipe(double diameter_mm, double length_km, double friction,
                     double density, double z_from, double z_to);

/// Inverse of the friction pressure-drop relation: flow for given pressures.
double darcy_flow(double p1, double p2, const DarcyPipe& pipe);

/// p2 - p1 for a given flow.
double darcy_pressure_difference(double q, const DarcyPipe& pipe);

/// p2 - p1 = -(q - nominal_flow) slope + (p2_nominal - p1_nominal)
struct DarcyLinearization {
    double x = 0.0;
    double nominal_flow = 0.0;
    double slope = 0.0;  // 2X/k
    double nominal_difference = 0.0;  // p2_nominal - p1_nominal
};

DarcyLinearization linearize_darcy(const DarcyPipe& pipe, double p1_nominal,
                                   double p2_nominal);

/// Flow implied by the linearised relation at the given pressures.
double darcy_flow_linearized(double p1, double p2, const DarcyLinearization& lin);

}  // namespace platopt::physics
