#include "platopt/physics.hpp"

#include <cmath>
#include <numbers>

#include "platopt/errors.hpp"

namespace platopt::physics {

CompressorCoefficients compressor_coefficients(const CompressorParams& p) {
    if (p.isentropic_efficiency <= 0.0 || p.heat_capacity_ratio <= 1.0) {
        throw DomainError("compressor needs efficiency > 0 and k > 1");
    }
    const double k = p.heat_capacity_ratio;
    CompressorCoefficients out;
    out.a = (k - 1.0) / k;
    // J/Sm3 -> MJ/Sm3 so that c q is in MW
    out.c = p.density / p.isentropic_efficiency / (k - 1.0) * p.compressibility *
            p.gas_constant * p.inlet_temperature * 1e-6;
    return out;
}

double compressor_power_nonlinear(double q, double p_in, double p_out,
                                  const CompressorCoefficients& coeff) {
    if (p_in <= 0.0 || p_out <= 0.0) {
        throw DomainError("compressor pressures must be positive");
    }
    return coeff.c * (std::pow(p_out / p_in, coeff.a) - 1.0) * q;
}

CompressorLinearization linearize_compressor(const CompressorNominal& nominal,
                                             const CompressorCoefficients& coeff) {
    if (nominal.p_in <= 0.0 || nominal.p_out <= 0.0) {
        throw DomainError("compressor nominal pressures must be positive");
    }
    const double ratio_a = std::pow(nominal.p_out / nominal.p_in, coeff.a);
    const double pressure_term = coeff.c * coeff.a * ratio_a * nominal.flow;
    CompressorLinearization lin;
    lin.per_flow = coeff.c * (ratio_a - 1.0);
    lin.per_outlet_pressure = pressure_term / nominal.p_out;
    lin.per_inlet_pressure = -pressure_term / nominal.p_in;
    return lin;
}

double compressor_power_linearized(double q, double p_in, double p_out,
                                   const CompressorNominal& nominal,
                                   const CompressorCoefficients& coeff) {
    if (nominal.p_in <= 0.0 || nominal.p_out <= 0.0) {
        throw DomainError("compressor nominal pressures must be positive");
    }
    const double ratio_a = std::pow(nominal.p_out / nominal.p_in, coeff.a);
    return coeff.c * (coeff.a * ratio_a * nominal.flow *
                          (p_out / nominal.p_out - p_in / nominal.p_in) +
                      (ratio_a - 1.0) * q);
}

double pump_power(double q, double efficiency, double p_in_nominal,
                  double p_out_nominal) {
    if (efficiency <= 0.0) throw DomainError("pump efficiency must be positive");
    return (p_out_nominal - p_in_nominal) * q / efficiency;
}

WellSplit well_split(double gas_oil_ratio, double water_cut) {
    if (water_cut < 0.0 || water_cut >= 1.0) {
        throw DomainError("water cut must lie in [0, 1)");
    }
    if (gas_oil_ratio < 0.0) throw DomainError("gas-oil ratio must be >= 0");
    const double oil_share = 1.0 - water_cut;
    const double denom = 1.0 + gas_oil_ratio * oil_share;
    return {water_cut / denom, oil_share / denom, gas_oil_ratio * oil_share / denom};
}

double gas_turbine_fuel(double el_out, double flow_max, double fuel_a,
                        double fuel_b, double on, double prep, double calorific) {
    if (flow_max <= 0.0) throw DomainError("gas turbine capacity must be positive");
    if (calorific <= 0.0) throw DomainError("calorific value must be positive");
    return (fuel_a * el_out + fuel_b * flow_max * (on + prep)) / calorific;
}

WeymouthPipe weymouth_pipe(double diameter_mm, double length_km, double z_from,
                           double z_to, double base_temperature,
                           double base_pressure, double gravity,
                           double gas_temperature, double compressibility) {
    if (diameter_mm <= 0.0 || length_km <= 0.0 || base_pressure <= 0.0 ||
        gravity <= 0.0 || gas_temperature <= 0.0 || compressibility <= 0.0) {
        throw DomainError("Weymouth pipe parameters must be positive");
    }
    WeymouthPipe pipe;
    pipe.s = 0.0684 * gravity * (z_to - z_from) / (gas_temperature * compressibility);
    pipe.exp_s = std::exp(pipe.s);
    pipe.equivalent_length_km =
        pipe.s == 0.0 ? length_km : length_km * std::expm1(pipe.s) / pipe.s;
    pipe.k = 4.3328e-8 * base_temperature / base_pressure *
             std::pow(gravity * gas_temperature * pipe.equivalent_length_km *
                          compressibility,
                      -0.5) *
             std::pow(diameter_mm, 8.0 / 3.0);
    return pipe;
}

double weymouth_flow(double p1, double p2, const WeymouthPipe& pipe) {
    const double arg = p1 * p1 - pipe.exp_s * p2 * p2;
    if (arg < 0.0) throw DomainError("Weymouth flow would be reversed");
    return pipe.k * std::sqrt(arg);
}

WeymouthLinearization linearize_weymouth(const WeymouthPipe& pipe, double p1_nominal,
                                         double p2_nominal) {
    const double arg = p1_nominal * p1_nominal - pipe.exp_s * p2_nominal * p2_nominal;
    if (!(arg > 0.0)) {
        throw InfeasibleNominalError(
            "Weymouth nominal pressures give no forward flow (p1^2 <= e^s p2^2)");
    }
    const double scale = pipe.k / std::sqrt(arg);
    return {scale * p1_nominal, -scale * pipe.exp_s * p2_nominal};
}

double weymouth_flow_linearized(double p1, double p2, const WeymouthPipe& pipe,
                                double p1_nominal, double p2_nominal) {
    const auto lin = linearize_weymouth(pipe, p1_nominal, p2_nominal);
    return lin.coef_p1 * p1 + lin.coef_p2 * p2;
}

DarcyPipe darcy_pipe(double diameter_mm, double length_km, double friction,
                     double density, double z_from, double z_to) {
    if (diameter_mm <= 0.0 || length_km <= 0.0 || friction <= 0.0 || density <= 0.0) {
        throw DomainError("Darcy-Weisbach pipe parameters must be positive");
    }
    const double d = diameter_mm * 1e-3;
    const double length = length_km * 1e3;
    const double pi = std::numbers::pi;
    DarcyPipe pipe;
    // SI gives m3/s per sqrt(Pa); 1 MPa = 1e6 Pa.
    pipe.k = std::sqrt(pi * pi * std::pow(d, 5) / (8.0 * friction * density * length)) * 1e3;
    pipe.elevation_head = density * kGravity * (z_to - z_from) * 1e-6;
    return pipe;
}

double darcy_flow(double p1, double p2, const DarcyPipe& pipe) {
    const double drive = (p1 - p2) - pipe.elevation_head;
    if (drive < 0.0) throw DomainError("Darcy-Weisbach flow would be reversed");
    return pipe.k * std::sqrt(drive);
}

double darcy_pressure_difference(double q, const DarcyPipe& pipe) {
    return -pipe.elevation_head - q * q / (pipe.k * pipe.k);
}

DarcyLinearization linearize_darcy(const DarcyPipe& pipe, double p1_nominal,
                                   double p2_nominal) {
    const double arg = (p1_nominal - p2_nominal) - pipe.elevation_head;
    if (!(arg > 0.0)) {
        throw InfeasibleNominalError(
            "Darcy-Weisbach nominal pressures give no forward flow (X <= 0)");
    }
    DarcyLinearization lin;
    lin.x = std::sqrt(arg);
    lin.nominal_flow = pipe.k * lin.x;
    lin.slope = 2.0 * lin.x / pipe.k;
    lin.nominal_difference = p2_nominal - p1_nominal;
    return lin;
}

double darcy_flow_linearized(double p1, double p2, const DarcyLinearization& lin) {
    // (p2 - p1) - nominal_difference = -(q - q_hat) slope
    return lin.nominal_flow - ((p2 - p1) - lin.nominal_difference) / lin.slope;
}

}  // namespace platopt::physics
