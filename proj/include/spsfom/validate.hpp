#pragma once

// Randomized cross-validation of the closed-form figures of merit against
// the numeric Bloch oracle. Parameter sets are drawn log-uniformly with the
// dephasing fraction x = gamma*/(kappa+gamma) confined to the perturbative
// band [0.01, 0.3]:
//
//   kappa, R ~ 10^U(-2,3) ps^-1,   gamma ~ 10^U(-4,1) * kappa,
//   gamma*  = x (kappa + gamma).
//
// Checks: |beta_analytic - beta_oracle| relative < 1e-9 (beta is exact);
// |I_perturbative - I_oracle| <= C x^2 with fitted C < 5; and the EigenSum
// and AdaptiveQuadrature oracle routes agree to 1e-6 relative.

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

#include "spsfom/bloch.hpp"
#include "spsfom/io_util.hpp"
#include "spsfom/markovian.hpp"
#include "spsfom/params.hpp"

namespace spsfom::validate {

struct Options {
    std::uint64_t seed = 12345;
    int samples = 100;
    bool compareQuadrature = true;
};

struct DrawnPoint {
    double kappa = 0.0;
    double r = 0.0;
    double gamma = 0.0;
    double gammaStar = 0.0;
};

struct Report {
    Options options;
    double maxBetaRelDev = 0.0;
    double fittedC = 0.0;
    double maxOracleRouteRelDev = 0.0;
    DrawnPoint worstBeta, worstC, worstRoute;
    bool pass = true;

    static constexpr double kBetaBound = 1e-9;
    static constexpr double kCBound = 5.0;
    static constexpr double kRouteBound = 1e-6;

    std::string text() const {
        std::ostringstream os;
        os << "validate: samples=" << options.samples << " seed=" << options.seed << "\n";
        auto point = [](const DrawnPoint& p) {
            return "kappa=" + io::fmt17(p.kappa) + " R=" + io::fmt17(p.r) +
                   " gamma=" + io::fmt17(p.gamma) + " gammaStar=" + io::fmt17(p.gammaStar) +
                   " (ps^-1)";
        };
        os << "  beta analytic-vs-oracle max rel dev = " << io::fmt17(maxBetaRelDev)
           << " (bound " << kBetaBound << ") " << (maxBetaRelDev < kBetaBound ? "OK" : "VIOLATION")
           << "\n    worst at " << point(worstBeta) << "\n";
        os << "  indist |full - oracle| / x^2 fitted C = " << io::fmt17(fittedC) << " (bound "
           << kCBound << ") " << (fittedC < kCBound ? "OK" : "VIOLATION") << "\n    worst at "
           << point(worstC) << "\n";
        if (options.compareQuadrature) {
            os << "  EigenSum-vs-AdaptiveQuadrature max rel dev = "
               << io::fmt17(maxOracleRouteRelDev) << " (bound " << kRouteBound << ") "
               << (maxOracleRouteRelDev < kRouteBound ? "OK" : "VIOLATION") << "\n    worst at "
               << point(worstRoute) << "\n";
        }
        os << (pass ? "validate: PASS" : "validate: FAIL") << "\n";
        return os.str();
    }
};

namespace detail {

// Platform-independent uniform draw (std distributions are not portable).
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

} // namespace detail

inline Report run(const Options& options) {
    Report report;
    report.options = options;
    std::mt19937_64 rng(options.seed);
    for (int i = 0; i < options.samples; ++i) {
        DrawnPoint p;
        p.kappa = std::pow(10.0, detail::uniform(rng, -2.0, 3.0));
        p.r = std::pow(10.0, detail::uniform(rng, -2.0, 3.0));
        p.gamma = std::pow(10.0, detail::uniform(rng, -4.0, 1.0)) * p.kappa;
        const double x = detail::uniform(rng, 0.01, 0.3);
        p.gammaStar = x * (p.kappa + p.gamma);

        const EmitterParams emitter{Rate(p.gamma), Rate(0.0), Rate(p.gammaStar),
                                    Rate::fromFrequencyTHz(405.0)};
        const CavityParams cavity{Rate(std::sqrt(p.r * p.kappa) / 2.0), Rate(p.kappa), 1.0};
        const Rate gq(0.0);

        const double betaAnalytic = markov::betaEfficiency(emitter, cavity, gq);
        const double iFull = markov::indistFirstOrder(emitter, cavity, gq);

        const auto matrices = bloch::buildMatrices(emitter, cavity, gq);
        const double betaOracle = bloch::betaNumeric(matrices, cavity.kappa);
        const double iEigen =
            bloch::indistNumeric(matrices, cavity.kappa, bloch::OracleMethod::EigenSum);

        const double betaDev = std::abs(betaAnalytic - betaOracle) / betaOracle;
        if (betaDev > report.maxBetaRelDev) {
            report.maxBetaRelDev = betaDev;
            report.worstBeta = p;
        }
        const double c = std::abs(iFull - iEigen) / (x * x);
        if (c > report.fittedC) {
            report.fittedC = c;
            report.worstC = p;
        }
        if (options.compareQuadrature) {
            const double iQuad = bloch::indistNumeric(matrices, cavity.kappa,
                                                      bloch::OracleMethod::AdaptiveQuadrature);
            const double routeDev = std::abs(iEigen - iQuad) / iEigen;
            if (routeDev > report.maxOracleRouteRelDev) {
                report.maxOracleRouteRelDev = routeDev;
                report.worstRoute = p;
            }
        }
    }
    report.pass = report.maxBetaRelDev < Report::kBetaBound && report.fittedC < Report::kCBound &&
                  (!options.compareQuadrature ||
                   report.maxOracleRouteRelDev < Report::kRouteBound);
    return report;
}

} // namespace spsfom::validate
