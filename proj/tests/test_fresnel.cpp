#include "scatter_sense/error.hpp"
#include "scatter_sense/fresnel.hpp"
#include "scatter_sense/materials.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace scatter_sense;

namespace {

MaterialParams smooth(MaterialParams m)
{
    m.roughness_m = 0.0;
    return m;
}

}  // namespace

TEST_CASE("glass power coefficients at 80 degrees")
{
    const auto glass = MaterialCatalog::builtin().lookup("glass");
    const auto r = reflection_coefficients(relative_permittivity(glass, 100.0), 80.0);
    CHECK(r.power_te() == doctest::Approx(0.739236).epsilon(1e-5));
    CHECK(r.power_tm() == doctest::Approx(0.128045).epsilon(1e-5));
}

TEST_CASE("smooth glass reflection loss on the 5 degree grid")
{
    const double expected[] = {7.343217, 7.343194, 7.342859, 7.341373, 7.337235, 7.328108, 7.310556, 7.279651, 7.228418,
                               7.147043, 7.021796, 6.833551, 6.555865, 6.152593, 5.575240, 4.760521, 3.628703};
    const auto glass = MaterialCatalog::builtin().lookup("glass");
    for (int k = 0; k <= 16; ++k) {
        CHECK(reflection_loss(glass, 5.0 * k, 100.0) == doctest::Approx(expected[k]).epsilon(1e-6));
    }
}

TEST_CASE("rough wood and plasterboard reflection loss")
{
    const auto catalog = MaterialCatalog::builtin();
    const auto& wood = catalog.lookup("wood");
    const auto& pb = catalog.lookup("plasterboard");
    CHECK(reflection_loss(wood, 0.0, 100.0) == doctest::Approx(27.528056).epsilon(1e-7));
    CHECK(reflection_loss(wood, 40.0, 100.0) == doctest::Approx(21.797839).epsilon(1e-7));
    CHECK(reflection_loss(wood, 80.0, 100.0) == doctest::Approx(4.674950).epsilon(1e-6));
    CHECK(reflection_loss(pb, 0.0, 100.0) == doctest::Approx(14.642107).epsilon(1e-7));
    CHECK(reflection_loss(pb, 55.0, 100.0) == doctest::Approx(10.909894).epsilon(1e-7));
}

TEST_CASE("smooth wood at normal incidence equals the closed form")
{
    const auto wood = smooth(MaterialCatalog::builtin().lookup("wood"));
    const auto eta = relative_permittivity(wood, 100.0);
    const std::complex<double> n = std::sqrt(std::complex<double>(eta.re, -eta.im));
    const double closed = -10.0 * std::log10(std::norm((1.0 - n) / (1.0 + n)));
    CHECK(closed == doctest::Approx(15.318985).epsilon(1e-7));
    CHECK(reflection_loss(wood, 0.0, 100.0) == doctest::Approx(closed).epsilon(1e-12));
}

TEST_CASE("roughness factor")
{
    CHECK(roughness_factor(0.0, 30.0, 0.003) == 1.0);
    CHECK(roughness_factor(0.0004, 0.0, 0.003) == doctest::Approx(0.245692).epsilon(1e-5));
    const double g = std::pow(4.0 * std::numbers::pi * 0.0004 / 0.003, 2);
    CHECK(g == doctest::Approx(2.807354).epsilon(1e-6));
    CHECK(roughness_factor(0.0004, 0.0, 0.003) == doctest::Approx(std::exp(-g / 2.0)));
    // cos(theta) enters squared inside the exponent.
    CHECK(roughness_factor(0.0004, 60.0, 0.003) == doctest::Approx(std::exp(-g * 0.25 / 2.0)));
    CHECK_THROWS_AS(roughness_factor(-1e-4, 0.0, 0.003), DomainError);
    CHECK_THROWS_AS(roughness_factor(1e-4, 0.0, 0.0), DomainError);
    CHECK(wavelength_m(100.0) == doctest::Approx(0.00299792458));
}

TEST_CASE("rough coefficients scale both polarisations by the same factor")
{
    const auto wood = MaterialCatalog::builtin().lookup("wood");
    const auto base = reflection_coefficients(relative_permittivity(wood, 100.0), 25.0);
    const auto rough = rough_reflection_coefficients(wood, 25.0, 100.0);
    const double rho = roughness_factor(wood.roughness_m, 25.0, wavelength_m(100.0));
    CHECK(std::abs(rough.r_te - rho * base.r_te) < 1e-12);
    CHECK(std::abs(rough.r_tm - rho * base.r_tm) < 1e-12);
}

TEST_CASE("normal incidence makes TE and TM power equal")
{
    for (const auto& m : MaterialCatalog::builtin().materials()) {
        const auto r = reflection_coefficients(relative_permittivity(m, 100.0), 0.0);
        CHECK(r.power_te() == doctest::Approx(r.power_tm()).epsilon(1e-12));
    }
}

TEST_CASE("TM reflectance dips near the pseudo-Brewster angle")
{
    const auto glass = MaterialCatalog::builtin().lookup("glass");
    const auto eta = relative_permittivity(glass, 100.0);
    double best_angle = 0.0;
    double best = 1.0;
    for (double t = 0.0; t < 89.95; t += 0.1) {
        const double p = reflection_coefficients(eta, t).power_tm();
        if (p < best) {
            best = p;
            best_angle = t;
        }
    }
    const double brewster = std::atan(std::sqrt(eta.re)) * 180.0 / std::numbers::pi;
    CHECK(best_angle == doctest::Approx(brewster).epsilon(0.01));
    CHECK(best < 1e-3);
}

TEST_CASE("energy bounds over random lossy media")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> re(1.0, 80.0);
    std::uniform_real_distribution<double> im(0.0, 50.0);
    std::uniform_real_distribution<double> angle(0.0, 89.99);
    for (int k = 0; k < 2000; ++k) {
        const ComplexPermittivity eta{re(rng), im(rng)};
        const auto r = reflection_coefficients(eta, angle(rng));
        CHECK(r.power_te() >= 0.0);
        CHECK(r.power_te() <= 1.0 + 1e-12);
        CHECK(r.power_tm() >= 0.0);
        CHECK(r.power_tm() <= 1.0 + 1e-12);
    }
}

TEST_CASE("reflection loss is non-negative for catalog materials")
{
    for (const auto& m : MaterialCatalog::builtin().materials()) {
        for (double t = 0.0; t < 90.0; t += 0.5) {
            for (double f : {1.0, 28.0, 60.0, 100.0, 300.0}) CHECK(reflection_loss(m, t, f) >= 0.0);
        }
    }
}

TEST_CASE("out-of-range incidence is rejected")
{
    const ComplexPermittivity eta{6.27, 0.19};
    CHECK_THROWS_AS(reflection_coefficients(eta, 90.0), DomainError);
    CHECK_THROWS_AS(reflection_coefficients(eta, -0.1), DomainError);
    CHECK_THROWS_AS(reflection_coefficients(eta, std::nan("")), DomainError);
    CHECK_NOTHROW(reflection_coefficients(eta, 89.999));
}
