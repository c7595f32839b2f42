#include "scatter_sense/fresnel.hpp"

#include "scatter_sense/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace scatter_sense {

namespace {

double to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

void check_angle(double theta_deg)
{
    if (!(theta_deg >= 0.0 && theta_deg < 90.0)) {
        throw DomainError(fmt::format("incident angle must be in [0, 90) degrees, got {}", theta_deg));
    }
}

}  // namespace

double wavelength_m(double f_ghz)
{
    if (!(f_ghz > 0.0)) throw DomainError(fmt::format("frequency must be positive, got {} GHz", f_ghz));
    return kSpeedOfLight / (f_ghz * 1e9);
}

ReflectionCoefficients reflection_coefficients(const ComplexPermittivity& eta, double theta_deg)
{
    check_angle(theta_deg);
    const double theta = to_radians(theta_deg);
    const double cos_t = std::cos(theta);
    const double sin_t = std::sin(theta);
    const std::complex<double> n2{eta.re, -eta.im};
    // std::sqrt on complex returns the principal root.
    const std::complex<double> root = std::sqrt(n2 - sin_t * sin_t);
    return {(cos_t - root) / (cos_t + root), (n2 * cos_t - root) / (n2 * cos_t + root)};
}

double roughness_factor(double sigma_m, double theta_deg, double wavelength)
{
    if (!(wavelength > 0.0)) throw DomainError(fmt::format("wavelength must be positive, got {}", wavelength));
    if (!(sigma_m >= 0.0)) throw DomainError(fmt::format("roughness must be >= 0, got {}", sigma_m));
    check_angle(theta_deg);
    const double phase = 4.0 * std::numbers::pi * sigma_m * std::cos(to_radians(theta_deg)) / wavelength;
    return std::exp(-0.5 * phase * phase);
}

ReflectionCoefficients rough_reflection_coefficients(const MaterialParams& material, double theta_deg,
                                                     double f_ghz)
{
    auto coeffs = reflection_coefficients(relative_permittivity(material, f_ghz), theta_deg);
    const double rho = roughness_factor(material.roughness_m, theta_deg, wavelength_m(f_ghz));
    coeffs.r_te *= rho;
    coeffs.r_tm *= rho;
    return coeffs;
}

double reflection_loss(const MaterialParams& material, double theta_deg, double f_ghz)
{
    return -10.0 * std::log10(rough_reflection_coefficients(material, theta_deg, f_ghz).effective_power());
}

}  // namespace scatter_sense
