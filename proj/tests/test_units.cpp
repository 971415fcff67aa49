#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "spsfom/params.hpp"
#include "spsfom/units.hpp"

using namespace spsfom;
using Catch::Approx;

TEST_CASE("rate conversions round-trip", "[units]") {
    const double values[] = {1e-6, 0.5, 500.0, 4.05e5};
    for (double f : values) {
        CHECK(Rate::fromFrequencyGHz(f).toFrequencyGHz() == Approx(f).epsilon(1e-12));
        CHECK(Rate::fromFrequencyTHz(f).toFrequencyTHz() == Approx(f).epsilon(1e-12));
    }
    // 2pi x 500 GHz stores as 2pi*0.5 ps^-1
    CHECK(Rate::fromFrequencyGHz(500.0).value() == Approx(kTwoPi * 0.5).epsilon(1e-15));
    // 8.3 ns lifetime stores as 1/8300 ps^-1, no 2pi factor
    CHECK(Rate::fromLifetimeNs(8.3).value() == Approx(1.0 / 8300.0).epsilon(1e-15));
    CHECK(Rate::fromLifetimeNs(8.3).toLifetimeNs() == Approx(8.3).epsilon(1e-12));
}

TEST_CASE("wavelength round-trip through angular frequency", "[units]") {
    const Rate omega = Rate::fromFrequencyTHz(405.0);
    CHECK(omega.toWavelengthNm() == Approx(kSpeedOfLightNmPerPs / 405.0).epsilon(1e-12));
    CHECK(Rate::fromWavelengthNm(omega.toWavelengthNm()).toFrequencyTHz() ==
          Approx(405.0).epsilon(1e-12));
}

TEST_CASE("validateParams reports violations", "[units]") {
    EmitterParams siv{Rate::fromLifetimeNs(8.3), Rate(0.0), Rate::fromFrequencyGHz(500.0),
                      Rate::fromFrequencyTHz(405.0)};
    CavityParams cavity{Rate(1.0), Rate(10.0), 0.9};
    CHECK(validateParams(siv, cavity).valid());

    EmitterParams noRad = siv;
    noRad.gammaR = Rate(0.0);
    const auto r1 = validateParams(noRad, cavity);
    REQUIRE_FALSE(r1.valid());
    CHECK(r1.violations.front() == "gammaR must be positive");

    CavityParams badEta = cavity;
    badEta.etaR = 1.2;
    const auto r2 = validateParams(siv, badEta);
    REQUIRE_FALSE(r2.valid());
    CHECK(r2.violations.front() == "etaR must lie in [0,1]");
}

TEST_CASE("purcellToR", "[units]") {
    // P = 2.7e5 with 1/gamma_r = 8.3 ns gives R = 3.253e4 ns^-1 = 32.53 ps^-1.
    const Rate r = purcellToR(2.7e5, Rate::fromLifetimeNs(8.3));
    CHECK(r.value() * 1e3 == Approx(2.7e5 / 8.3).epsilon(1e-12));
    CHECK(r.value() * 1e3 == Approx(3.253e4).epsilon(1e-3));
    CHECK(purcellToR(0.0, Rate(1.0)).value() == 0.0);
    CHECK_THROWS_AS(purcellToR(-1.0, Rate(1.0)), std::domain_error);
    CHECK_THROWS_AS(purcellToR(1.0, Rate(0.0)), std::domain_error);
}

TEST_CASE("rFromMode normalization", "[units]") {
    // lambda/n = 1, Q = 4pi^2/3, V = 1 gives P = 1, so R = gamma_r.
    const Rate gammaR(0.123);
    const Rate r = rFromMode(1.0, 1.0, 4.0 * kPi * kPi / 3.0, 1.0, gammaR);
    CHECK(r.value() == Approx(gammaR.value()).epsilon(1e-12));
    CHECK_THROWS_AS(rFromMode(-1.0, 1.0, 1.0, 1.0, gammaR), std::domain_error);
}

TEST_CASE("cavity transfer rate agrees between parametrizations", "[units]") {
    const Rate gammaR = Rate::fromLifetimeNs(8.3);
    const Rate omega = Rate::fromFrequencyTHz(405.0);
    const double purcell = 2.7e5;
    const auto cavity = CavityParams::fromPurcell(purcell, gammaR, omega, 60.0, 0.95);
    // R from g, kappa vs R = P gamma_r
    const double direct = cavity.transferRate().value();
    const double fromPurcell = purcellToR(purcell, gammaR).value();
    CHECK(direct == Approx(fromPurcell).epsilon(1e-10));
    CHECK(cavity.qualityFactor(omega) == Approx(60.0).epsilon(1e-12));
    CHECK(cavity.kappaR().value() + cavity.kappaNR().value() ==
          Approx(cavity.kappa.value()).epsilon(1e-12));
}

TEST_CASE("quench model reduction to effective detuning", "[units]") {
    const auto perMode = QuenchModel::perMode({{0.5, Rate(30.0)}});
    CHECK(perMode.toEffectiveDetuning().value() == Approx(60.0).epsilon(1e-12));
    // two modes: 1/Dq^2 = sum k^2/D^2
    const auto two = QuenchModel::perMode({{0.5, Rate(30.0)}, {0.25, Rate(60.0)}});
    const double inv = 0.25 / 900.0 + 0.0625 / 3600.0;
    CHECK(two.toEffectiveDetuning().value() == Approx(1.0 / std::sqrt(inv)).epsilon(1e-12));

    CHECK(QuenchModel::none().empty());
    CHECK_THROWS_AS(QuenchModel::effectiveDetuning(Rate(0.0)), std::domain_error);
    CHECK_THROWS_AS(QuenchModel::perMode({{0.5, Rate(-1.0)}}), std::domain_error);
}

TEST_CASE("quench Markovian validity flag", "[units]") {
    const auto model = QuenchModel::perMode({{0.5, Rate(30.0)}});
    CHECK(model.markovianValid(Rate(10.0), Rate(5.0)));        // g_l^2 = 25 < 900+6.25
    CHECK_FALSE(model.markovianValid(Rate(100.0), Rate(5.0)));  // g_l^2 = 2500 > 906.25
}

TEST_CASE("parameter containers equality is value-based", "[units]") {
    EmitterParams a{Rate(1.0), Rate(0.0), Rate(2.0), Rate(3.0)};
    EmitterParams b = a;
    CHECK(a == b);
    b.gammaStar = Rate(2.5);
    CHECK_FALSE(a == b);
    CHECK(QuenchModel::perMode({{0.5, Rate(30.0)}}) == QuenchModel::perMode({{0.5, Rate(30.0)}}));
}
