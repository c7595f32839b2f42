#pragma once

#include "scatter_sense/materials.hpp"

#include <complex>

namespace scatter_sense {

/// Complex TE/TM amplitude reflection coefficients at an air/material interface.
struct ReflectionCoefficients {
    std::complex<double> r_te;
    std::complex<double> r_tm;

    double power_te() const { return std::norm(r_te); }
    double power_tm() const { return std::norm(r_tm); }
    /// Average of TE and TM power, the effective coefficient for cross-polarised antennas.
    double effective_power() const { return 0.5 * (power_te() + power_tm()); }
};

/// Fresnel coefficients for incidence from air at theta_deg in [0, 90).
ReflectionCoefficients reflection_coefficients(const ComplexPermittivity& eta, double theta_deg);

/// Rayleigh roughness factor exp(-g/2), g = (4*pi*sigma*cos(theta)/lambda)^2.
double roughness_factor(double sigma_m, double theta_deg, double wavelength_m);

/// Coefficients scaled by the material's roughness factor at f_ghz.
ReflectionCoefficients rough_reflection_coefficients(const MaterialParams& material, double theta_deg,
                                                     double f_ghz);

/// Single-bounce reflection loss -10*log10(R_e) in dB, roughness included.
double reflection_loss(const MaterialParams& material, double theta_deg, double f_ghz);

double wavelength_m(double f_ghz);

inline constexpr double kSpeedOfLight = 299792458.0;

}  // namespace scatter_sense
