// spsfom: figures of merit for a solid-state single-photon emitter coupled
// to an ultrasmall-mode-volume cavity.
//
// Subcommands:
//   fom       single-point beta, I and PSB-corrected values
//   sweep     parameter-grid CSV (deterministic byte-for-byte)
//   optimize  numeric Ibeta maximizer vs the closed-form cavity point
//   psb       Debye-Waller factor, F(Q), S0 and validity ratios
//   validate  randomized analytic-vs-oracle cross-check
//
// Exit codes: 0 success, 1 validation failure, 2 config error, 3 I/O error.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "spsfom/bloch.hpp"
#include "spsfom/config.hpp"
#include "spsfom/io_util.hpp"
#include "spsfom/markovian.hpp"
#include "spsfom/presets.hpp"
#include "spsfom/psb.hpp"
#include "spsfom/sweep.hpp"
#include "spsfom/validate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitIoError = 3;

constexpr const char* kVersion = "1.0.0";

struct GlobalOptions {
    std::string configPath;
    std::string outPath;
    std::uint64_t seed = 12345;
    std::string methodOverride;
    int threads = 0;  // 0: use SPSFOM_THREADS or 1
};

int resolveThreads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SPSFOM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

spsfom::config::System loadSystem(const GlobalOptions& opts, spsfom::config::KeyValues& kv) {
    if (opts.configPath.empty())
        throw spsfom::config::ConfigError("this subcommand requires --config <path>");
    kv = spsfom::config::parseConfigFile(opts.configPath);
    auto sys = spsfom::config::buildSystem(kv);
    if (!opts.methodOverride.empty()) sys.method = spsfom::config::parseMethod(opts.methodOverride);
    return sys;
}

std::ofstream openOutput(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open output path '" + path + "'");
    return out;
}

void printFlags(std::ostream& os, const spsfom::markov::FomResult& fom) {
    os << "regime critical=" << fom.regime.critical
       << " strongCoupling=" << fom.regime.strongCoupling << " badCavity=" << fom.regime.badCavity
       << " quenchDominated=" << fom.regime.quenchDominated << "\n";
    os << "validity perturbativeOK=" << fom.validity.perturbativeOK
       << " simplifiedOK=" << fom.validity.simplifiedOK
       << " quenchMarkovOK=" << fom.validity.quenchMarkovOK << "\n";
}

int cmdFom(const GlobalOptions& opts) {
    using namespace spsfom;
    config::KeyValues kv;
    const auto sys = loadSystem(opts, kv);

    markov::FomResult fom;
    if (sys.method == markov::Method::NumericOracle)
        fom = bloch::computeFomOracle(sys.emitter, sys.cavity, sys.quench);
    else
        fom = markov::computeFom(sys.emitter, sys.cavity, sys.quench, sys.method);

    std::ostringstream os;
    os << "config_hash=" << io::hex64(sys.configHash) << "\n";
    os << "method=" << markov::methodName(fom.method) << "\n";
    os << "gammaQ_GHz=" << io::fmt17(fom.quenchRate.toFrequencyGHz()) << "\n";
    os << "etaR=" << io::fmt17(sys.cavity.etaR) << "\n";
    os << "Q=" << io::fmt17(sys.cavity.qualityFactor(sys.emitter.omega0)) << "\n";
    os << "beta0=" << io::fmt17(fom.beta) << "\n";
    os << "I0=" << io::fmt17(fom.indist) << "\n";
    os << "I0beta0=" << io::fmt17(fom.product) << "\n";
    os << "I0beta0etaR=" << io::fmt17(fom.product * sys.cavity.etaR) << "\n";
    if (sys.spectrum) {
        const double q = sys.cavity.qualityFactor(sys.emitter.omega0);
        const double f = psb::filterFraction(*sys.spectrum, q);
        const double b2 = psb::dwFactor(*sys.spectrum);
        const auto corrected = psb::applyPsbCorrection(
            {b2, f, std::clamp(fom.indist, 0.0, 1.0), std::clamp(fom.beta, 0.0, 1.0)});
        const auto validity =
            psb::validityCheck(sys.emitter, sys.cavity, *sys.spectrum, fom.quenchRate);
        os << "DW=" << io::fmt17(b2) << "\n";
        os << "F=" << io::fmt17(f) << "\n";
        os << "I=" << io::fmt17(corrected.indist) << "\n";
        os << "beta=" << io::fmt17(corrected.beta) << "\n";
        os << "Ibeta=" << io::fmt17(corrected.indist * corrected.beta) << "\n";
        os << "IbetaEtaR=" << io::fmt17(corrected.indist * corrected.beta * sys.cavity.etaR)
           << "\n";
        os << "psb weakCouplingOK=" << validity.weakCouplingOK
           << " dephasingModelOK=" << validity.dephasingModelOK
           << " couplingRatio=" << io::fmt17(validity.couplingRatio)
           << " dephasingRatio=" << io::fmt17(validity.dephasingRatio) << "\n";
    } else {
        os << "I=" << io::fmt17(fom.indist) << "\n";
        os << "beta=" << io::fmt17(fom.beta) << "\n";
        os << "Ibeta=" << io::fmt17(fom.product) << "\n";
        os << "IbetaEtaR=" << io::fmt17(fom.product * sys.cavity.etaR) << "\n";
    }
    printFlags(os, fom);

    if (!opts.outPath.empty()) {
        auto out = openOutput(opts.outPath);
        out << os.str();
    }
    std::cout << os.str();
    return kExitOk;
}

int cmdSweep(const GlobalOptions& opts) {
    using namespace spsfom;
    config::KeyValues kv;
    const auto sys = loadSystem(opts, kv);
    const auto spec = config::buildSweepSpec(kv, sys);
    if (opts.outPath.empty())
        throw config::ConfigError("sweep requires --out <path> for the CSV result");
    const auto result = sweep::runSweep(spec, resolveThreads(opts.threads), kVersion);
    auto out = openOutput(opts.outPath);
    sweep::writeCsv(result, out);
    if (!out) throw std::ios_base::failure("write failed for '" + opts.outPath + "'");
    std::cout << "sweep: wrote " << result.grid.size() << " points to " << opts.outPath << "\n";
    return kExitOk;
}

int cmdOptimize(const GlobalOptions& opts) {
    using namespace spsfom;
    config::KeyValues kv;
    const auto sys = loadSystem(opts, kv);
    if (sys.quench.empty())
        std::cout << "note: no quench model; Ibeta grows along R=kappa and the maximizer will sit "
                     "on the search-box boundary\n";

    sweep::MaximizeContext ctx{sys.emitter, sys.quench, sys.cavity.etaR, sys.method};
    sweep::SearchBox box;
    const double gs = sys.emitter.gammaStar.value();
    if (kv.has("sweep.x.quantity") && kv.has("sweep.y.quantity")) {
        const auto spec = config::buildSweepSpec(kv, sys);
        auto toBox = [&](const sweep::AxisSpec& axis, bool& isR) {
            switch (axis.quantity) {
                case sweep::AxisQuantity::ROverGammaStar: isR = true; return std::pair{axis.min * gs, axis.max * gs};
                case sweep::AxisQuantity::ROverGammaR:
                    isR = true;
                    return std::pair{axis.min * sys.emitter.gammaR.value(),
                                     axis.max * sys.emitter.gammaR.value()};
                case sweep::AxisQuantity::KappaOverGammaStar:
                    isR = false;
                    return std::pair{axis.min * gs, axis.max * gs};
                case sweep::AxisQuantity::QualityFactor:
                    isR = false;
                    return std::pair{sys.emitter.omega0.value() / axis.max,
                                     sys.emitter.omega0.value() / axis.min};
                default:
                    throw config::ConfigError("optimize: axes must span R (or g) and kappa");
            }
        };
        bool xIsR = false, yIsR = false;
        const auto xr = toBox(spec.x, xIsR);
        const auto yr = toBox(spec.y, yIsR);
        if (xIsR == yIsR) throw config::ConfigError("optimize: need one transfer axis and one linewidth axis");
        const auto rRange = xIsR ? xr : yr;
        const auto kRange = xIsR ? yr : xr;
        box = {rRange.first, rRange.second, kRange.first, kRange.second};
        ctx.emitter = spec.fixed.emitter;  // honors sweep.bareDecayRatio
    } else if (!sys.quench.empty()) {
        const auto closed =
            markov::optimalCavity(sys.emitter.gammaStar, sys.quench.toEffectiveDetuning(),
                                  sys.cavity.etaR);
        // Closed form predicts R = kappa = kappa_max; search two decades around it.
        const double k0 = closed.kappaMax.value();
        box = {k0 / 50.0, 50.0 * k0, k0 / 50.0, 50.0 * k0};
    } else {
        throw config::ConfigError("optimize: give sweep.x/sweep.y axes or a quench model");
    }

    const auto best = sweep::maximizeIBeta(ctx, sweep::SearchVariables::RAndKappa, box);
    std::ostringstream os;
    os << "maximizer g_GHz=" << io::fmt17(best.g.toFrequencyGHz())
       << " kappa_GHz=" << io::fmt17(best.kappa.toFrequencyGHz())
       << " R_over_gammaStar=" << io::fmt17(best.transferRate.value() / gs)
       << " kappa_over_gammaStar=" << io::fmt17(best.kappa.value() / gs) << "\n";
    os << "Ibeta=" << io::fmt17(best.value) << "\n";
    os << "gammaQ_over_gammaStar=" << io::fmt17(best.gammaQ.value() / gs) << "\n";
    os << "converged=" << best.converged << " onBoundary=" << best.onBoundary
       << " stages=" << best.stages << "\n";
    if (!sys.quench.empty() && sys.cavity.etaR < 1.0) {
        const auto closed = markov::optimalCavity(sys.emitter.gammaStar,
                                                  sys.quench.toEffectiveDetuning(), sys.cavity.etaR);
        os << "closedForm g_GHz=" << io::fmt17(closed.gMax.toFrequencyGHz())
           << " kappa_GHz=" << io::fmt17(closed.kappaMax.toFrequencyGHz())
           << " gammaQAtMax_over_gammaStar=" << io::fmt17(closed.gammaQAtMax.value() / gs)
           << " smallRatioOK=" << closed.smallRatioOK << "\n";
        os << "locationRatio g=" << io::fmt17(best.g.value() / closed.gMax.value())
           << " kappa=" << io::fmt17(best.kappa.value() / closed.kappaMax.value()) << "\n";
    }
    if (!opts.outPath.empty()) {
        auto out = openOutput(opts.outPath);
        out << os.str();
    }
    std::cout << os.str();
    return kExitOk;
}

int cmdPsb(const GlobalOptions& opts) {
    using namespace spsfom;
    config::KeyValues kv;
    const auto sys = loadSystem(opts, kv);
    if (!sys.spectrum) throw config::ConfigError("psb: config must set psb.sample");
    const auto& spectrum = *sys.spectrum;
    const double q = sys.cavity.qualityFactor(sys.emitter.omega0);
    const Rate gq = markov::quenchRate(sys.quench, sys.cavity.g, sys.cavity.kappaNR());
    const auto validity = psb::validityCheck(sys.emitter, sys.cavity, spectrum, gq);

    std::ostringstream os;
    os << "lambda0_nm=" << io::fmt17(spectrum.lambda0Nm) << "\n";
    os << "delta_nm=" << io::fmt17(spectrum.deltaNm) << "\n";
    os << "terms=" << spectrum.coeffs.size() << "\n";
    os << "DW=" << io::fmt17(psb::dwFactor(spectrum)) << "\n";
    os << "F(Q=" << io::fmt17(q) << ")=" << io::fmt17(psb::filterFraction(spectrum, q)) << "\n";
    os << "S0=" << io::fmt17(psb::s0Diagnostic(spectrum)) << "\n";
    os << "weakCouplingOK=" << validity.weakCouplingOK
       << " couplingRatio=" << io::fmt17(validity.couplingRatio) << "\n";
    os << "dephasingModelOK=" << validity.dephasingModelOK
       << " dephasingRatio=" << io::fmt17(validity.dephasingRatio) << "\n";
    std::cout << os.str();

    if (!opts.outPath.empty()) {
        auto out = openOutput(opts.outPath);
        psb::writeSpectrumCsv(spectrum, out);
        if (!out) throw std::ios_base::failure("write failed for '" + opts.outPath + "'");
    }
    return kExitOk;
}

int cmdValidate(const GlobalOptions& opts, int samples, bool skipQuadrature) {
    using namespace spsfom;
    validate::Options vopts;
    vopts.seed = opts.seed;
    vopts.samples = samples;
    vopts.compareQuadrature = !skipQuadrature;
    const auto report = validate::run(vopts);
    std::cout << report.text();
    if (!opts.outPath.empty()) {
        auto out = openOutput(opts.outPath);
        out << report.text();
    }
    return report.pass ? kExitOk : kExitValidationFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"figures of merit for cavity-enhanced room-temperature single-photon sources"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    GlobalOptions opts;
    app.add_option("--config", opts.configPath, "key=value config file");
    app.add_option("--out", opts.outPath, "output path");
    app.add_option("--seed", opts.seed, "RNG seed (validate)");
    app.add_option("--method", opts.methodOverride, "full|simplified|oracle (overrides config)")
        ->check(CLI::IsMember({"full", "simplified", "oracle"}));
    app.add_option("--threads", opts.threads, "worker threads (default: SPSFOM_THREADS or 1)");

    auto* fom = app.add_subcommand("fom", "single-point figures of merit");
    auto* sweepCmd = app.add_subcommand("sweep", "grid sweep to CSV");
    auto* optimize = app.add_subcommand("optimize", "maximize Ibeta over cavity parameters");
    auto* psbCmd = app.add_subcommand("psb", "phonon-sideband analysis");
    auto* validateCmd = app.add_subcommand("validate", "analytic-vs-oracle cross-check");
    int samples = 100;
    bool skipQuadrature = false;
    validateCmd->add_option("--samples", samples, "number of random parameter sets");
    validateCmd->add_flag("--skip-quadrature", skipQuadrature,
                          "skip the quadrature-route comparison");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (fom->parsed()) return cmdFom(opts);
        if (sweepCmd->parsed()) return cmdSweep(opts);
        if (optimize->parsed()) return cmdOptimize(opts);
        if (psbCmd->parsed()) return cmdPsb(opts);
        if (validateCmd->parsed()) return cmdValidate(opts, samples, skipQuadrature);
    } catch (const spsfom::config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidationFailure;
    }
    return kExitConfigError;
}
