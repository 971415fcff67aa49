#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "spsfom/config.hpp"

using namespace spsfom;
using Catch::Approx;

namespace {

const char* kMinimal =
    "emitter.gammaR_ns = 8.3\n"
    "emitter.gammaStar_GHz = 500\n"
    "emitter.omega_THz = 405\n"
    "cavity.purcell = 2.7e5\n"
    "cavity.Q = 60\n"
    "cavity.etaR = 0.9\n";

} // namespace

TEST_CASE("config parses comments, blanks and whitespace", "[config]") {
    const auto kv = config::parseConfigText(
        "# comment\n\n  emitter.gammaR_ns =  8.3  \nemitter.gammaStar_GHz=500\n"
        "emitter.omega_THz=405\ncavity.purcell=2.7e5\ncavity.Q=60\n");
    CHECK(kv.getDouble("emitter.gammaR_ns") == 8.3);
    const auto sys = config::buildSystem(kv);
    CHECK(sys.emitter.gammaR.value() == Approx(1.0 / 8300.0).epsilon(1e-14));
    CHECK(sys.emitter.gammaStar.value() == Approx(kTwoPi * 0.5).epsilon(1e-14));
    CHECK(sys.cavity.qualityFactor(sys.emitter.omega0) == Approx(60.0).epsilon(1e-12));
    CHECK(sys.cavity.transferRate().value() ==
          Approx(2.7e5 / 8300.0).epsilon(1e-10));
}

TEST_CASE("unknown keys are hard errors", "[config]") {
    CHECK_THROWS_WITH(config::parseConfigText("emitter.gamma_ns = 8.3\n"),
                      Catch::Matchers::ContainsSubstring("unknown key 'emitter.gamma_ns'"));
    CHECK_THROWS_AS(config::parseConfigText("emitter.gammaR_ns: 8.3\n"), config::ConfigError);
    CHECK_THROWS_WITH(
        config::parseConfigText("emitter.gammaR_ns=8.3\nemitter.gammaR_ns=9\n"),
        Catch::Matchers::ContainsSubstring("duplicate key"));
}

TEST_CASE("cavity parametrizations are mutually exclusive", "[config]") {
    // neither form
    CHECK_THROWS_WITH(
        config::buildSystem(config::parseConfigText(
            "emitter.gammaR_ns=8.3\nemitter.gammaStar_GHz=500\nemitter.omega_THz=405\n")),
        Catch::Matchers::ContainsSubstring("exactly one of"));
    // both forms
    CHECK_THROWS_AS(
        config::buildSystem(config::parseConfigText(
            std::string(kMinimal) + "cavity.g_GHz=1000\ncavity.kappa_GHz=5000\n")),
        config::ConfigError);
    // g without kappa
    CHECK_THROWS_AS(config::buildSystem(config::parseConfigText(
                        "emitter.gammaR_ns=8.3\nemitter.gammaStar_GHz=500\n"
                        "emitter.omega_THz=405\ncavity.g_GHz=1000\n")),
                    config::ConfigError);
    // purcell without Q
    CHECK_THROWS_AS(config::buildSystem(config::parseConfigText(
                        "emitter.gammaR_ns=8.3\nemitter.gammaStar_GHz=500\n"
                        "emitter.omega_THz=405\ncavity.purcell=2.7e5\n")),
                    config::ConfigError);
    // direct g and kappa
    const auto sys = config::buildSystem(config::parseConfigText(
        "emitter.gammaR_ns=8.3\nemitter.gammaStar_GHz=500\nemitter.omega_THz=405\n"
        "cavity.g_GHz=2956\ncavity.kappa_GHz=6750\ncavity.etaR=0.97\n"));
    CHECK(sys.cavity.g.toFrequencyGHz() == Approx(2956.0).epsilon(1e-12));
    CHECK(sys.cavity.kappa.toFrequencyGHz() == Approx(6750.0).epsilon(1e-12));
}

TEST_CASE("quench forms", "[config]") {
    const auto effective = config::buildSystem(
        config::parseConfigText(std::string(kMinimal) + "quench.DeltaQ_THz = 5\n"));
    CHECK(effective.quench.toEffectiveDetuning().value() ==
          Approx(kTwoPi * 5.0).epsilon(1e-14));

    const auto combined = config::buildSystem(
        config::parseConfigText(std::string(kMinimal) + "quench.DeltaQCombined_THz = 30\n"));
    // Dq = D sqrt(1-etaR) with etaR = 0.9
    CHECK(combined.quench.toEffectiveDetuning().value() ==
          Approx(kTwoPi * 30.0 * std::sqrt(0.1)).epsilon(1e-12));

    const auto perMode = config::buildSystem(config::parseConfigText(
        std::string(kMinimal) + "quench.modes = 0.5:15000; 0.25:30000\n"));
    REQUIRE(perMode.quench.isPerMode());
    REQUIRE(perMode.quench.modes().size() == 2);
    CHECK(perMode.quench.modes()[0].k == 0.5);
    CHECK(perMode.quench.modes()[0].delta.toFrequencyGHz() == Approx(15000.0).epsilon(1e-12));

    CHECK_THROWS_AS(config::buildSystem(config::parseConfigText(
                        std::string(kMinimal) + "quench.DeltaQ_THz=5\nquench.modes=0.5:100\n")),
                    config::ConfigError);
    CHECK_THROWS_AS(config::buildSystem(config::parseConfigText(std::string(kMinimal) +
                                                                "quench.modes = 0.5-100\n")),
                    config::ConfigError);
}

TEST_CASE("psb sources", "[config]") {
    CHECK_FALSE(config::buildSystem(config::parseConfigText(kMinimal)).spectrum.has_value());
    const auto s3 = config::buildSystem(
        config::parseConfigText(std::string(kMinimal) + "psb.sample = sample3\n"));
    REQUIRE(s3.spectrum.has_value());
    CHECK(s3.spectrum->coeffs.size() == 6);
    CHECK_THROWS_AS(config::buildSystem(config::parseConfigText(std::string(kMinimal) +
                                                                "psb.sample = sample7\n")),
                    config::ConfigError);
}

TEST_CASE("method selection", "[config]") {
    CHECK(config::buildSystem(config::parseConfigText(std::string(kMinimal) + "method=full\n"))
              .method == markov::Method::FullPerturbative);
    CHECK(config::buildSystem(
              config::parseConfigText(std::string(kMinimal) + "method=simplified\n"))
              .method == markov::Method::SimplifiedEq5);
    CHECK(config::buildSystem(config::parseConfigText(std::string(kMinimal) + "method=oracle\n"))
              .method == markov::Method::NumericOracle);
    CHECK_THROWS_AS(
        config::buildSystem(config::parseConfigText(std::string(kMinimal) + "method=exact\n")),
        config::ConfigError);
}

TEST_CASE("sweep axes parse into a validated spec", "[config]") {
    const std::string text = std::string(kMinimal) +
                             "quench.DeltaQ_THz=5\n"
                             "sweep.x.quantity=R_over_gammaStar\nsweep.x.min=1\nsweep.x.max=100\n"
                             "sweep.x.points=5\n"
                             "sweep.y.quantity=kappa_over_gammaStar\nsweep.y.scale=log\n"
                             "sweep.y.min=1\nsweep.y.max=100\nsweep.y.points=7\n"
                             "sweep.bareDecayRatio=1e-4\n";
    const auto kv = config::parseConfigText(text);
    const auto sys = config::buildSystem(kv);
    const auto spec = config::buildSweepSpec(kv, sys);
    CHECK(spec.x.points == 5);
    CHECK(spec.y.points == 7);
    CHECK(spec.fixed.emitter.gammaR.value() ==
          Approx(1e-4 * sys.emitter.gammaStar.value()).epsilon(1e-14));

    // same-role axes rejected
    const std::string bad = std::string(kMinimal) +
                            "sweep.x.quantity=Q\nsweep.x.min=1\nsweep.x.max=100\nsweep.x.points=5\n"
                            "sweep.y.quantity=kappa_over_gammaStar\nsweep.y.min=1\n"
                            "sweep.y.max=100\nsweep.y.points=5\n";
    const auto kvBad = config::parseConfigText(bad);
    CHECK_THROWS_AS(config::buildSweepSpec(kvBad, config::buildSystem(kvBad)),
                    std::domain_error);
}

TEST_CASE("parameter validation failures surface with key diagnostics", "[config]") {
    CHECK_THROWS_WITH(
        config::buildSystem(config::parseConfigText(
            "emitter.gammaR_ns=8.3\nemitter.gammaStar_GHz=500\nemitter.omega_THz=405\n"
            "cavity.purcell=2.7e5\ncavity.Q=60\ncavity.etaR=1.2\n")),
        Catch::Matchers::ContainsSubstring("etaR"));
    CHECK_THROWS_WITH(
        config::buildSystem(config::parseConfigText(
            "emitter.gammaR_ns=8.3\nemitter.gammaStar_GHz=500\nemitter.omega_THz=405\n"
            "cavity.purcell=2.7e5\ncavity.Q=abc\n")),
        Catch::Matchers::ContainsSubstring("cannot parse number"));
}

TEST_CASE("config hash is stable against reformatting only when bytes match", "[config]") {
    const auto a = config::buildSystem(config::parseConfigText(kMinimal));
    const auto b = config::buildSystem(config::parseConfigText(kMinimal));
    CHECK(a.configHash == b.configHash);
    const auto c = config::buildSystem(config::parseConfigText(std::string("# x\n") + kMinimal));
    CHECK(a.configHash != c.configHash);
}
