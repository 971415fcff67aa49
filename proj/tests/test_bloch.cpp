#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "spsfom/bloch.hpp"
#include "spsfom/markovian.hpp"
#include "spsfom/presets.hpp"

using namespace spsfom;
using Catch::Approx;
using Complex = std::complex<double>;

namespace {

EmitterParams makeEmitter(double gamma, double gammaStar) {
    return {Rate(gamma), Rate(0.0), Rate(gammaStar), Rate::fromFrequencyTHz(405.0)};
}

CavityParams makeCavityRK(double r, double kappa) {
    return {Rate(std::sqrt(r * kappa) / 2.0), Rate(kappa), 1.0};
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct DrawnParams {
    EmitterParams emitter;
    CavityParams cavity;
};

DrawnParams drawPoint(std::mt19937_64& rng) {
    const double kappa = std::pow(10.0, -2.0 + 5.0 * uniform01(rng));
    const double r = std::pow(10.0, -2.0 + 5.0 * uniform01(rng));
    const double gamma = std::pow(10.0, -4.0 + 5.0 * uniform01(rng)) * kappa;
    const double x = 0.01 + 0.29 * uniform01(rng);
    return {makeEmitter(gamma, x * (kappa + gamma)), makeCavityRK(r, kappa)};
}

} // namespace

TEST_CASE("Bloch matrices match the stated entries", "[bloch]") {
    const double g = 1.7, kappa = 5.0, gs = 0.9, gamma = 0.3;
    const auto m = bloch::buildMatrices(makeEmitter(gamma, gs),
                                        CavityParams{Rate(g), Rate(kappa), 1.0}, Rate(0.0));
    const Complex i2g(0.0, 2.0 * g);
    CHECK(m.a1(0, 0) == Complex(-kappa / 2.0, 0.0));
    CHECK(m.a1(0, 1) == i2g / 2.0);
    CHECK(m.a1(1, 0) == i2g / 2.0);
    CHECK(m.a1(1, 1) == Complex(-(gs + gamma) / 2.0, 0.0));

    CHECK(m.a2(0, 0) == Complex(-kappa, 0.0));
    CHECK(m.a2(0, 1) == -i2g / 2.0);
    CHECK(m.a2(0, 2) == i2g / 2.0);
    CHECK(m.a2(0, 3) == Complex(0.0, 0.0));
    CHECK(m.a2(1, 1) == Complex(-(kappa + gs + gamma) / 2.0, 0.0));
    CHECK(m.a2(1, 3) == i2g / 2.0);
    CHECK(m.a2(3, 3) == Complex(-gamma, 0.0));
    CHECK(m.a2(3, 1) == i2g / 2.0);
    CHECK(m.a2(3, 2) == -i2g / 2.0);
    // complex symmetric
    CHECK(m.a2(2, 0) == m.a2(0, 2));
    CHECK(m.a2(3, 1) == m.a2(1, 3));
}

TEST_CASE("quench rate feeds gamma in the matrices", "[bloch]") {
    const auto base = bloch::buildMatrices(makeEmitter(0.3, 0.9),
                                           CavityParams{Rate(1.0), Rate(5.0), 1.0}, Rate(0.2));
    const auto summed = bloch::buildMatrices(makeEmitter(0.5, 0.9),
                                             CavityParams{Rate(1.0), Rate(5.0), 1.0}, Rate(0.0));
    CHECK((base.a2 - summed.a2).norm() == Approx(0.0).margin(1e-15));
}

TEST_CASE("decoupled and Hermitian limits", "[bloch]") {
    // g = 0: A1 diagonal
    const auto m0 = bloch::buildMatrices(makeEmitter(0.4, 1.1),
                                         CavityParams{Rate(0.0), Rate(6.0), 1.0}, Rate(0.0));
    CHECK(std::abs(m0.a1(0, 1)) == 0.0);
    CHECK(m0.a1(0, 0).real() == Approx(-3.0));
    CHECK(m0.a1(1, 1).real() == Approx(-0.75));

    // kappa = gamma = gamma* = 0, g = 1: pure Rabi rotation, eigenvalues +-i
    Eigen::Matrix2cd a1;
    const Complex i2(0.0, 2.0);
    a1 << Complex(0.0, 0.0), i2 / 2.0, i2 / 2.0, Complex(0.0, 0.0);
    a1 *= 1.0;  // A1 = -(1/2)[[0,-2i],[-2i,0]] = [[0,i],[i,0]]
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(a1);
    std::array<double, 2> imag{es.eigenvalues()(0).imag(), es.eigenvalues()(1).imag()};
    std::sort(imag.begin(), imag.end());
    CHECK(imag[0] == Approx(-1.0).margin(1e-12));
    CHECK(imag[1] == Approx(1.0).margin(1e-12));
}

TEST_CASE("A2 eigenvalues are dissipative on random parameters", "[bloch][property]") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto p = drawPoint(rng);
        const auto m = bloch::buildMatrices(p.emitter, p.cavity, Rate(0.0));
        Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(m.a2, false);
        for (int k = 0; k < 4; ++k) REQUIRE(es.eigenvalues()(k).real() <= 1e-12);
    }
}

TEST_CASE("numeric beta equals the closed form", "[bloch][property]") {
    std::mt19937_64 rng(6);
    double worst = 0.0;
    for (int i = 0; i < 300; ++i) {
        const auto p = drawPoint(rng);
        const auto m = bloch::buildMatrices(p.emitter, p.cavity, Rate(0.0));
        const double numeric = bloch::betaNumeric(m, p.cavity.kappa);
        const double analytic = markov::betaEfficiency(p.emitter, p.cavity, Rate(0.0));
        worst = std::max(worst, std::abs(numeric - analytic) / analytic);
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("numeric beta limits and errors", "[bloch]") {
    // gamma = 0: everything leaves through the cavity
    const auto m = bloch::buildMatrices(makeEmitter(0.0, 1.0), makeCavityRK(4.0, 8.0), Rate(0.0));
    CHECK(bloch::betaNumeric(m, Rate(8.0)) == Approx(1.0).margin(1e-12));
    // g = 0, gamma = 0: A2 singular
    const auto bad = bloch::buildMatrices(makeEmitter(0.0, 1.0),
                                          CavityParams{Rate(0.0), Rate(8.0), 1.0}, Rate(0.0));
    CHECK_THROWS_AS(bloch::betaNumeric(bad, Rate(8.0)), std::domain_error);
    // SiV preset
    const auto siv = presets::sivHybridSample5();
    const Rate gq = markov::quenchRate(siv.quench, siv.cavity.g, siv.cavity.kappaNR());
    const auto ms = bloch::buildMatrices(siv.emitter, siv.cavity, gq);
    CHECK(bloch::betaNumeric(ms, siv.cavity.kappa) == Approx(0.98).margin(0.01));
}

TEST_CASE("g1 correlation basics", "[bloch]") {
    const auto m = bloch::buildMatrices(makeEmitter(0.1, 0.7), makeCavityRK(5.0, 9.0), Rate(0.0));
    // tau = 0: g1(t,0) = W14(t) = <a+a>(t), real and nonnegative
    for (double t : {0.0, 0.05, 0.3, 1.0, 3.0}) {
        const Complex v = bloch::g1Correlation(m, t, 0.0);
        CHECK(std::abs(v.imag()) < 1e-12);
        CHECK(v.real() >= -1e-12);
    }
    // t = 0: no photon in the cavity yet, so the correlation vanishes
    for (double tau : {0.0, 0.1, 1.0}) {
        CHECK(std::abs(bloch::g1Correlation(m, 0.0, tau)) < 1e-14);
    }
    CHECK_THROWS_AS(bloch::g1Correlation(m, -1.0, 0.0), std::domain_error);
}

TEST_CASE("g1 obeys Cauchy-Schwarz on a sampled grid", "[bloch][property]") {
    const auto m = bloch::buildMatrices(makeEmitter(0.05, 0.9), makeCavityRK(7.0, 11.0),
                                        Rate(0.0));
    const bloch::Propagators p(m);
    for (double t : {0.02, 0.1, 0.4, 1.3}) {
        for (double tau : {0.01, 0.2, 0.8, 2.5}) {
            const double lhs = std::abs(bloch::g1Correlation(m, t, tau));
            const double rhs = std::sqrt(p.w14(t + tau).real() * p.w14(t).real());
            REQUIRE(lhs <= rhs + 1e-12);
        }
    }
}

TEST_CASE("correlation grid sampling", "[bloch]") {
    const auto m = bloch::buildMatrices(makeEmitter(0.1, 0.6), makeCavityRK(4.0, 8.0), Rate(0.0));
    const auto grid = bloch::sampleG1(m, {0.0, 0.1, 0.5}, {0.0, 0.2});
    REQUIRE(grid.values.size() == 6);
    // values at tau = 0 are real and nonnegative
    for (std::size_t it = 0; it < grid.tGrid.size(); ++it) {
        CHECK(std::abs(grid.at(it, 0).imag()) < 1e-12);
        CHECK(grid.at(it, 0).real() >= -1e-12);
    }
}

TEST_CASE("propagator semigroup property", "[bloch][property]") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 50; ++i) {
        const auto pt = drawPoint(rng);
        const auto m = bloch::buildMatrices(pt.emitter, pt.cavity, Rate(0.0));
        const bloch::Propagators p(m);
        const double t1 = 0.3 / pt.cavity.kappa.value(), t2 = 1.1 / pt.cavity.kappa.value();
        const Eigen::Matrix2cd u12 = p.u(t1 + t2);
        const Eigen::Matrix2cd uProd = p.u(t1) * p.u(t2);
        REQUIRE((u12 - uProd).norm() <= 1e-10 * std::max(1.0, uProd.norm()));
        const Eigen::Matrix4cd w12 = p.w(t1 + t2);
        const Eigen::Matrix4cd wProd = p.w(t1) * p.w(t2);
        REQUIRE((w12 - wProd).norm() <= 1e-10 * std::max(1.0, wProd.norm()));
    }
}

TEST_CASE("indistinguishability oracle desk values", "[bloch]") {
    // no dephasing, no bare decay: pure single-photon wavepacket
    const auto pure = bloch::buildMatrices(makeEmitter(0.0, 0.0), makeCavityRK(5.0, 10.0),
                                           Rate(0.0));
    CHECK(bloch::indistNumeric(pure, Rate(10.0)) == Approx(1.0).margin(1e-8));

    // gamma = 0, gamma* = 1, R = kappa = 10: the brute-force oracle for the
    // perturbative desk value 0.8832...
    const auto desk = bloch::buildMatrices(makeEmitter(0.0, 1.0), makeCavityRK(10.0, 10.0),
                                           Rate(0.0));
    const double oracle = bloch::indistNumeric(desk, Rate(10.0));
    CHECK(oracle == Approx(0.8862849013368667).epsilon(1e-9));
    CHECK(std::abs(oracle - 0.8832686793725755) < 0.01);  // within (gamma*/kappa)^2

    // SiV preset: paper quotes I0 = 0.90
    const auto siv = presets::sivHybridSample5();
    const Rate gq = markov::quenchRate(siv.quench, siv.cavity.g, siv.cavity.kappaNR());
    const auto ms = bloch::buildMatrices(siv.emitter, siv.cavity, gq);
    CHECK(bloch::indistNumeric(ms, siv.cavity.kappa) == Approx(0.90).margin(0.01));
}

TEST_CASE("EigenSum and AdaptiveQuadrature agree", "[bloch][property]") {
    std::mt19937_64 rng(9);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto pt = drawPoint(rng);
        const auto m = bloch::buildMatrices(pt.emitter, pt.cavity, Rate(0.0));
        const double eigenSum = bloch::indistNumeric(m, pt.cavity.kappa,
                                                     bloch::OracleMethod::EigenSum);
        const double quadrature = bloch::indistNumeric(m, pt.cavity.kappa,
                                                       bloch::OracleMethod::AdaptiveQuadrature);
        worst = std::max(worst, std::abs(eigenSum - quadrature) / eigenSum);
        REQUIRE(eigenSum >= 0.0);
        REQUIRE(eigenSum <= 1.0 + 1e-9);
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("oracle handles an exceptional point of A1", "[bloch]") {
    // g = (kappa - gamma - gamma*)/4 makes A1 defective; the quadrature
    // fallback with Pade propagators must still agree with the perturbative
    // series at its accuracy level.
    const double kappa = 10.0, gamma = 1.0, gs = 1.0;
    const double g = (kappa - gamma - gs) / 4.0;
    const CavityParams cavity{Rate(g), Rate(kappa), 1.0};
    const auto emitter = makeEmitter(gamma, gs);
    const auto m = bloch::buildMatrices(emitter, cavity, Rate(0.0));
    const double oracle = bloch::indistNumeric(m, Rate(kappa));
    CHECK(std::isfinite(oracle));
    const double beta = bloch::betaNumeric(m, Rate(kappa));
    CHECK(beta == Approx(markov::betaEfficiency(emitter, cavity, Rate(0.0))).epsilon(1e-9));
    const double x = gs / (kappa + gamma);
    const double full = markov::indistFirstOrder(emitter, cavity, Rate(0.0));
    CHECK(std::abs(oracle - full) < 5.0 * x * x);
}

TEST_CASE("quadrature truncation: outer tail is negligible beyond T*", "[bloch]") {
    const auto m = bloch::buildMatrices(makeEmitter(0.05, 0.8), makeCavityRK(6.0, 9.0), Rate(0.0));
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(m.a2, false);
    double slowest = -1e300;
    for (int k = 0; k < 4; ++k) slowest = std::max(slowest, es.eigenvalues()(k).real());
    const double tStar = 40.0 / std::abs(slowest);
    CHECK(bloch::indistOuterTailFraction(m, tStar) < 1e-8);
    CHECK(bloch::indistOuterTailFraction(m, 2.0 * tStar) < 1e-8);
}

TEST_CASE("Eq. (4) denominator diagnostic on the SiV preset", "[bloch]") {
    // int int <a+a>(t+tau)<a+a>(t) = beta^2/(2 kappa^2) under the wavepacket
    // normalization; consistency diagnostic, evaluated once.
    const auto siv = presets::sivHybridSample5();
    const Rate gq = markov::quenchRate(siv.quench, siv.cavity.g, siv.cavity.kappaNR());
    const auto m = bloch::buildMatrices(siv.emitter, siv.cavity, gq);
    const double beta = bloch::betaNumeric(m, siv.cavity.kappa);
    const double k = siv.cavity.kappa.value();
    const double denominator = bloch::eq4DenominatorDiagnostic(m);
    CHECK(denominator == Approx(beta * beta / (2.0 * k * k)).epsilon(1e-6));
}

TEST_CASE("oracle-backed computeFom", "[bloch]") {
    const auto siv = presets::sivHybridSample5();
    const auto fom = bloch::computeFomOracle(siv.emitter, siv.cavity, siv.quench);
    CHECK(fom.method == markov::Method::NumericOracle);
    CHECK(fom.beta == Approx(0.98).margin(0.01));
    CHECK(fom.indist == Approx(0.90).margin(0.01));
    CHECK(fom.product == fom.beta * fom.indist);
}
