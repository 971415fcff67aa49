#pragma once

// Parameter-grid evaluation of the figures of merit, numerical maximization
// of the Ibeta product over cavity parameters, and Q_max scans against the
// effective quench detuning. Grid points are independent work items; result
// assembly is indexed by grid position, so output is deterministic for any
// thread count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "spsfom/io_util.hpp"
#include "spsfom/markovian.hpp"
#include "spsfom/params.hpp"
#include "spsfom/psb.hpp"
#include "spsfom/units.hpp"

namespace spsfom::sweep {

enum class AxisQuantity {
    ROverGammaStar,
    KappaOverGammaStar,
    QualityFactor,
    DeltaQOverGammaStar,
    ROverGammaR,
};

inline const char* axisQuantityName(AxisQuantity q) {
    switch (q) {
        case AxisQuantity::ROverGammaStar: return "R_over_gammaStar";
        case AxisQuantity::KappaOverGammaStar: return "kappa_over_gammaStar";
        case AxisQuantity::QualityFactor: return "Q";
        case AxisQuantity::DeltaQOverGammaStar: return "DeltaQ_over_gammaStar";
        case AxisQuantity::ROverGammaR: return "R_over_gammaR";
    }
    return "?";
}

struct AxisSpec {
    AxisQuantity quantity = AxisQuantity::ROverGammaStar;
    bool logScale = true;
    double min = 0.0;
    double max = 0.0;
    int points = 0;
};

struct Outputs {
    bool beta = true;
    bool indist = true;
    bool product = true;
    bool regimeFlags = true;
    bool validityFlags = true;
    bool errEstimate = false;
};

struct SweepContext {
    EmitterParams emitter;
    CavityParams cavity;  // baseline; axis quantities override g/kappa per point
    QuenchModel quench;
    std::optional<psb::PsbSpectrum> spectrum;  // attach for PSB-corrected values
    markov::Method method = markov::Method::FullPerturbative;
};

struct SweepSpec {
    AxisSpec x;
    AxisSpec y;
    SweepContext fixed;
    Outputs outputs;
};

namespace detail {

enum class AxisRole { Transfer, Linewidth, Quench };

inline AxisRole roleOf(AxisQuantity q) {
    switch (q) {
        case AxisQuantity::ROverGammaStar:
        case AxisQuantity::ROverGammaR: return AxisRole::Transfer;
        case AxisQuantity::KappaOverGammaStar:
        case AxisQuantity::QualityFactor: return AxisRole::Linewidth;
        case AxisQuantity::DeltaQOverGammaStar: return AxisRole::Quench;
    }
    return AxisRole::Transfer;
}

inline void validateAxis(const AxisSpec& a) {
    if (!(a.min < a.max)) throw std::domain_error("axis requires min < max");
    if (a.points < 2) throw std::domain_error("axis requires pointCount >= 2");
    if (a.logScale && !(a.min > 0.0)) throw std::domain_error("log axis requires min > 0");
}

inline std::vector<double> axisValues(const AxisSpec& a) {
    std::vector<double> v(static_cast<std::size_t>(a.points));
    for (int i = 0; i < a.points; ++i) {
        const double s = static_cast<double>(i) / (a.points - 1);
        v[static_cast<std::size_t>(i)] =
            a.logScale ? a.min * std::pow(a.max / a.min, s) : a.min + (a.max - a.min) * s;
    }
    v.front() = a.min;
    v.back() = a.max;
    return v;
}

} // namespace detail

struct PointResult {
    double x = 0.0;
    double y = 0.0;
    bool ok = false;
    markov::FomResult fom;
    bool hasPsb = false;
    double filterFraction = 0.0;
    double indistCorrected = 0.0;
    double betaCorrected = 0.0;
    double productCorrected = 0.0;
    bool psbWeakCouplingOK = true;
    bool psbDephasingOK = true;
    double errEstimate = 0.0;
    std::string error;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<PointResult> grid;  // row-major: index = ix * ys.size() + iy
    std::string provenance;         // '#'-prefixed echo block for the CSV

    const PointResult& at(std::size_t ix, std::size_t iy) const {
        return grid[ix * ys.size() + iy];
    }
};

namespace detail {

// Resolve the parameter set at one grid point: linewidth axes fix kappa,
// transfer axes fix R (hence g at the resolved kappa), the quench axis
// replaces the effective detuning.
struct PointSetup {
    EmitterParams emitter;
    CavityParams cavity;
    QuenchModel quench;
};

inline PointSetup resolvePoint(const SweepContext& ctx, AxisQuantity xq, double xv,
                               AxisQuantity yq, double yv) {
    const double gs = ctx.emitter.gammaStar.value();
    const double gr = ctx.emitter.gammaR.value();

    double kappa = ctx.cavity.kappa.value();
    double r = ctx.cavity.transferRate().value();
    QuenchModel quench = ctx.quench;
    bool rSet = false;

    auto apply = [&](AxisQuantity q, double v) {
        switch (q) {
            case AxisQuantity::KappaOverGammaStar: kappa = v * gs; break;
            case AxisQuantity::QualityFactor: kappa = ctx.emitter.omega0.value() / v; break;
            case AxisQuantity::ROverGammaStar: r = v * gs; rSet = true; break;
            case AxisQuantity::ROverGammaR: r = v * gr; rSet = true; break;
            case AxisQuantity::DeltaQOverGammaStar:
                quench = QuenchModel::effectiveDetuning(Rate(v * gs));
                break;
        }
    };
    // Linewidth first so a transfer axis sees the final kappa.
    if (roleOf(xq) == AxisRole::Linewidth) apply(xq, xv);
    if (roleOf(yq) == AxisRole::Linewidth) apply(yq, yv);
    if (roleOf(xq) != AxisRole::Linewidth) apply(xq, xv);
    if (roleOf(yq) != AxisRole::Linewidth) apply(yq, yv);

    PointSetup setup;
    setup.emitter = ctx.emitter;
    const double g = rSet ? std::sqrt(r * kappa) / 2.0
                          : ctx.cavity.g.value() * std::sqrt(kappa / ctx.cavity.kappa.value());
    setup.cavity = CavityParams{Rate(g), Rate(kappa), ctx.cavity.etaR};
    setup.quench = quench;
    return setup;
}

inline double perturbativeErrorEstimate(const EmitterParams& e, const CavityParams& c, Rate gq,
                                        markov::Method method) {
    const double gamma = (e.bareDecay() + gq).value();
    const double x = e.gammaStar.value() / (c.kappa.value() + gamma);
    double est = 5.0 * x * x;  // fitted-envelope bound for the full series
    if (method == markov::Method::SimplifiedEq5) {
        const double y = e.gammaStar.value() / c.kappa.value();
        est += 2.0 * y * y;
    }
    return est;
}

inline std::string provenanceBlock(const SweepSpec& spec, std::uint64_t hash,
                                   const std::string& toolVersion) {
    std::string p;
    auto line = [&p](const std::string& s) { p += "# " + s + "\n"; };
    line("spsfom sweep");
    line("version=" + toolVersion);
    line("config_hash=" + io::hex64(hash));
    line(std::string("method=") + markov::methodName(spec.fixed.method));
    auto axis = [&](const char* name, const AxisSpec& a) {
        line(std::string(name) + ".quantity=" + axisQuantityName(a.quantity));
        line(std::string(name) + ".scale=" + (a.logScale ? "log" : "linear"));
        line(std::string(name) + ".min=" + io::fmt17(a.min));
        line(std::string(name) + ".max=" + io::fmt17(a.max));
        line(std::string(name) + ".points=" + std::to_string(a.points));
    };
    axis("x", spec.x);
    axis("y", spec.y);
    const auto& e = spec.fixed.emitter;
    line("emitter.gammaR=" + io::fmt17(e.gammaR.value()));
    line("emitter.gammaNR=" + io::fmt17(e.gammaNR.value()));
    line("emitter.gammaStar=" + io::fmt17(e.gammaStar.value()));
    line("emitter.omega0=" + io::fmt17(e.omega0.value()));
    const auto& c = spec.fixed.cavity;
    line("cavity.g=" + io::fmt17(c.g.value()));
    line("cavity.kappa=" + io::fmt17(c.kappa.value()));
    line("cavity.etaR=" + io::fmt17(c.etaR));
    if (spec.fixed.quench.empty()) {
        line("quench=none");
    } else if (spec.fixed.quench.isPerMode()) {
        std::string modes;
        for (const auto& m : spec.fixed.quench.modes()) {
            if (!modes.empty()) modes += ';';
            modes += io::fmt17(m.k) + ":" + io::fmt17(m.delta.value());
        }
        line("quench.modes=" + modes);
    } else {
        line("quench.DeltaQ=" + io::fmt17(spec.fixed.quench.toEffectiveDetuning().value()));
    }
    if (spec.fixed.spectrum) {
        line("psb.lambda0_nm=" + io::fmt17(spec.fixed.spectrum->lambda0Nm));
        line("psb.delta_nm=" + io::fmt17(spec.fixed.spectrum->deltaNm));
        line("psb.terms=" + std::to_string(spec.fixed.spectrum->coeffs.size()));
    } else {
        line("psb=none");
    }
    return p;
}

} // namespace detail

inline void validateSpec(const SweepSpec& spec) {
    detail::validateAxis(spec.x);
    detail::validateAxis(spec.y);
    if (detail::roleOf(spec.x.quantity) == detail::roleOf(spec.y.quantity))
        throw std::domain_error("sweep axes must control different quantities");
}

inline SweepResult runSweep(const SweepSpec& spec, int threads = 1,
                            const std::string& toolVersion = "1.0.0") {
    validateSpec(spec);
    SweepResult result;
    result.spec = spec;
    result.xs = detail::axisValues(spec.x);
    result.ys = detail::axisValues(spec.y);
    result.provenance = detail::provenanceBlock(
        spec, io::fnv1a(detail::provenanceBlock(spec, 0, toolVersion)), toolVersion);

    // F(Q) is independent of g, so memoize it per distinct kappa before the
    // parallel loop; kappa only takes axis or baseline values.
    std::map<double, double> filterByKappa;
    if (spec.fixed.spectrum) {
        auto record = [&](double kappa) {
            const double q = spec.fixed.emitter.omega0.value() / kappa;
            if (!filterByKappa.count(kappa))
                filterByKappa[kappa] = psb::filterFraction(*spec.fixed.spectrum, q);
        };
        const bool xIsLinewidth = detail::roleOf(spec.x.quantity) == detail::AxisRole::Linewidth;
        const bool yIsLinewidth = detail::roleOf(spec.y.quantity) == detail::AxisRole::Linewidth;
        if (xIsLinewidth)
            for (double v : result.xs)
                record(detail::resolvePoint(spec.fixed, spec.x.quantity, v, spec.y.quantity,
                                            result.ys.front())
                           .cavity.kappa.value());
        else if (yIsLinewidth)
            for (double v : result.ys)
                record(detail::resolvePoint(spec.fixed, spec.x.quantity, result.xs.front(),
                                            spec.y.quantity, v)
                           .cavity.kappa.value());
        else
            record(spec.fixed.cavity.kappa.value());
    }

    const std::size_t nx = result.xs.size();
    const std::size_t ny = result.ys.size();
    result.grid.resize(nx * ny);

    auto evaluate = [&](std::size_t index) {
        const std::size_t ix = index / ny;
        const std::size_t iy = index % ny;
        PointResult& point = result.grid[index];
        point.x = result.xs[ix];
        point.y = result.ys[iy];
        try {
            const auto setup = detail::resolvePoint(spec.fixed, spec.x.quantity, point.x,
                                                    spec.y.quantity, point.y);
            point.fom = markov::computeFom(setup.emitter, setup.cavity, setup.quench,
                                           spec.fixed.method);
            point.errEstimate = detail::perturbativeErrorEstimate(
                setup.emitter, setup.cavity, point.fom.quenchRate, spec.fixed.method);
            if (spec.fixed.spectrum) {
                point.hasPsb = true;
                const auto it = filterByKappa.find(setup.cavity.kappa.value());
                point.filterFraction =
                    it != filterByKappa.end()
                        ? it->second
                        : psb::filterFraction(*spec.fixed.spectrum,
                                              setup.cavity.qualityFactor(setup.emitter.omega0));
                const double b2 = psb::dwFactor(*spec.fixed.spectrum);
                const auto corrected = psb::applyPsbCorrection(
                    {b2, point.filterFraction, std::clamp(point.fom.indist, 0.0, 1.0),
                     std::clamp(point.fom.beta, 0.0, 1.0)});
                point.indistCorrected = corrected.indist;
                point.betaCorrected = corrected.beta;
                point.productCorrected = corrected.indist * corrected.beta;
                const auto validity = psb::validityCheck(setup.emitter, setup.cavity,
                                                         *spec.fixed.spectrum,
                                                         point.fom.quenchRate);
                point.psbWeakCouplingOK = validity.weakCouplingOK;
                point.psbDephasingOK = validity.dephasingModelOK;
            }
            point.ok = true;
        } catch (const std::exception& err) {
            point.ok = false;
            point.error = err.what();
        }
    };

    const std::size_t total = nx * ny;
    const int workerCount = std::max(1, threads);
    if (workerCount == 1) {
        for (std::size_t i = 0; i < total; ++i) evaluate(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(workerCount));
        for (int w = 0; w < workerCount; ++w)
            workers.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1))
                    evaluate(i);
            });
        for (auto& worker : workers) worker.join();
    }
    return result;
}

inline void writeCsv(const SweepResult& result, std::ostream& os) {
    const Outputs& out = result.spec.outputs;
    os << result.provenance;
    os << "x,y";
    if (out.beta) os << ",beta";
    if (out.indist) os << ",indist";
    if (out.product) os << ",product";
    os << ",gammaQ";
    if (out.regimeFlags) os << ",critical,strongCoupling,badCavity,quenchDominated";
    if (out.validityFlags) os << ",perturbativeOK,simplifiedOK,quenchMarkovOK";
    if (result.spec.fixed.spectrum) {
        os << ",F,indistCorrected,betaCorrected,productCorrected,psbWeakCouplingOK,psbDephasingOK";
    }
    if (out.errEstimate) os << ",errEstimate";
    os << ",ok\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& p : result.grid) {
        auto value = [&](double v) { return p.ok ? v : nan; };
        os << io::fmt17(p.x) << ',' << io::fmt17(p.y);
        if (out.beta) os << ',' << io::fmt17(value(p.fom.beta));
        if (out.indist) os << ',' << io::fmt17(value(p.fom.indist));
        if (out.product) os << ',' << io::fmt17(value(p.fom.product));
        os << ',' << io::fmt17(value(p.fom.quenchRate.value()));
        if (out.regimeFlags)
            os << ',' << (p.ok && p.fom.regime.critical) << ',' << (p.ok && p.fom.regime.strongCoupling)
               << ',' << (p.ok && p.fom.regime.badCavity) << ',' << (p.ok && p.fom.regime.quenchDominated);
        if (out.validityFlags)
            os << ',' << (p.ok && p.fom.validity.perturbativeOK) << ','
               << (p.ok && p.fom.validity.simplifiedOK) << ','
               << (p.ok && p.fom.validity.quenchMarkovOK);
        if (result.spec.fixed.spectrum) {
            os << ',' << io::fmt17(value(p.filterFraction)) << ','
               << io::fmt17(value(p.indistCorrected)) << ',' << io::fmt17(value(p.betaCorrected))
               << ',' << io::fmt17(value(p.productCorrected)) << ','
               << (p.ok && p.psbWeakCouplingOK) << ',' << (p.ok && p.psbDephasingOK);
        }
        if (out.errEstimate) os << ',' << io::fmt17(value(p.errEstimate));
        os << ',' << (p.ok ? 1 : 0) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Ibeta maximization over cavity parameters.

enum class SearchVariables { GAndKappa, RAndKappa };

struct SearchBox {
    double firstMin = 0.0;  // g or R
    double firstMax = 0.0;
    double kappaMin = 0.0;
    double kappaMax = 0.0;
};

struct MaximizeContext {
    EmitterParams emitter;
    QuenchModel quench;
    double etaR = 1.0;
    markov::Method method = markov::Method::FullPerturbative;
};

struct MaximizeResult {
    Rate g{0.0};
    Rate kappa{0.0};
    Rate transferRate{0.0};
    Rate gammaQ{0.0};
    double value = 0.0;
    bool onBoundary = false;  // maximum sits on the search-box rim: result suspect
    bool converged = false;
    int stages = 0;
    std::vector<double> stageIncumbents;
};

inline MaximizeResult maximizeIBeta(const MaximizeContext& ctx, SearchVariables vars,
                                    const SearchBox& box, int gridPerStage = 33,
                                    double relBoxTarget = 1e-3) {
    if (!(box.firstMin > 0.0 && box.firstMin < box.firstMax && box.kappaMin > 0.0 &&
          box.kappaMax > box.kappaMin))
        throw std::domain_error("maximizeIBeta: invalid search box");
    auto objective = [&](double first, double kappa) {
        const double g =
            vars == SearchVariables::GAndKappa ? first : std::sqrt(first * kappa) / 2.0;
        const CavityParams cavity{Rate(g), Rate(kappa), ctx.etaR};
        const auto fom = markov::computeFom(ctx.emitter, cavity, ctx.quench, ctx.method);
        return std::pair<double, markov::FomResult>(fom.product, fom);
    };

    double lo1 = box.firstMin, hi1 = box.firstMax;
    double lo2 = box.kappaMin, hi2 = box.kappaMax;
    MaximizeResult result;
    double best1 = lo1, best2 = lo2;
    double bestValue = -std::numeric_limits<double>::infinity();

    for (int stage = 0; stage < 64; ++stage) {
        ++result.stages;
        for (int i = 0; i < gridPerStage; ++i) {
            const double s = static_cast<double>(i) / (gridPerStage - 1);
            const double v1 = lo1 * std::pow(hi1 / lo1, s);
            for (int j = 0; j < gridPerStage; ++j) {
                const double t = static_cast<double>(j) / (gridPerStage - 1);
                const double v2 = lo2 * std::pow(hi2 / lo2, t);
                double value;
                try {
                    value = objective(v1, v2).first;
                } catch (const std::exception&) {
                    continue;
                }
                if (value > bestValue) {
                    bestValue = value;
                    best1 = v1;
                    best2 = v2;
                }
            }
        }
        result.stageIncumbents.push_back(bestValue);
        const double span1 = hi1 / lo1;
        const double span2 = hi2 / lo2;
        if (std::max(span1, span2) - 1.0 < relBoxTarget) {
            result.converged = true;
            break;
        }
        // Shrink the box 4x (log scale) around the incumbent, clamped to the
        // original search region.
        const double shrink1 = std::pow(span1, 0.5 / 4.0);
        const double shrink2 = std::pow(span2, 0.5 / 4.0);
        lo1 = std::max(box.firstMin, best1 / shrink1);
        hi1 = std::min(box.firstMax, best1 * shrink1);
        lo2 = std::max(box.kappaMin, best2 / shrink2);
        hi2 = std::min(box.kappaMax, best2 * shrink2);
    }

    const auto [value, fom] = objective(best1, best2);
    result.value = value;
    result.kappa = Rate(best2);
    result.g = vars == SearchVariables::GAndKappa ? Rate(best1)
                                                  : Rate(std::sqrt(best1 * best2) / 2.0);
    result.transferRate = Rate(4.0 * result.g.value() * result.g.value() / best2);
    result.gammaQ = fom.quenchRate;
    const double edgeTol = 1.02;
    const double first = vars == SearchVariables::GAndKappa ? result.g.value()
                                                            : result.transferRate.value();
    result.onBoundary = first < box.firstMin * edgeTol || first > box.firstMax / edgeTol ||
                        best2 < box.kappaMin * edgeTol || best2 > box.kappaMax / edgeTol;
    return result;
}

// ---------------------------------------------------------------------------
// Q_max scan: for each combined detuning D = Delta_q (1-etaR)^{-1/2}, find
// the quality factor maximizing the PSB-corrected Ibeta at fixed R/gamma_r.

struct QMaxScanContext {
    EmitterParams emitter;
    double purcell = 0.0;  // R / gamma_r
    psb::PsbSpectrum spectrum;
    double qMin = 1.0;
    double qMax = 2000.0;
    markov::Method method = markov::Method::FullPerturbative;
};

struct QMaxPoint {
    double combinedDetuningOverGammaStar = 0.0;
    double qMax = 0.0;
    double ibAtQMax = 0.0;
    bool onBoundary = false;
};

inline double correctedIBetaAtQ(const QMaxScanContext& ctx, Rate combinedDetuning, double q,
                                std::map<double, double>* filterCache = nullptr) {
    const Rate r = purcellToR(ctx.purcell, ctx.emitter.gammaR);
    const Rate kappa = ctx.emitter.omega0 / q;
    const Rate g{std::sqrt(r.value() * kappa.value()) / 2.0};
    // gamma_q = g^2 kappa / D^2: the (1-etaR) factors cancel in the combined
    // detuning parametrization.
    const double d = combinedDetuning.value();
    const Rate gq{g.value() * g.value() * kappa.value() / (d * d)};
    const CavityParams cavity{g, kappa, 1.0};
    const double beta0 = markov::betaEfficiency(ctx.emitter, cavity, gq);
    const double i0 = ctx.method == markov::Method::SimplifiedEq5
                          ? markov::indistSimplified(ctx.emitter, cavity, gq)
                          : markov::indistFirstOrder(ctx.emitter, cavity, gq);
    double f;
    if (filterCache) {
        auto it = filterCache->find(q);
        if (it == filterCache->end())
            it = filterCache->emplace(q, psb::filterFraction(ctx.spectrum, q)).first;
        f = it->second;
    } else {
        f = psb::filterFraction(ctx.spectrum, q);
    }
    const auto corrected = psb::applyPsbCorrection(
        {psb::dwFactor(ctx.spectrum), f, std::clamp(i0, 0.0, 1.0), std::clamp(beta0, 0.0, 1.0)});
    return corrected.indist * corrected.beta;
}

inline std::vector<QMaxPoint> qMaxScan(const QMaxScanContext& ctx,
                                       const std::vector<Rate>& combinedDetunings) {
    std::vector<QMaxPoint> curve;
    curve.reserve(combinedDetunings.size());
    std::map<double, double> filterCache;
    for (const Rate d : combinedDetunings) {
        double lo = ctx.qMin, hi = ctx.qMax;
        double bestQ = lo, bestV = -std::numeric_limits<double>::infinity();
        for (int stage = 0; stage < 40; ++stage) {
            const int n = 33;
            for (int i = 0; i < n; ++i) {
                const double q = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
                const double v = correctedIBetaAtQ(ctx, d, q, &filterCache);
                if (v > bestV) {
                    bestV = v;
                    bestQ = q;
                }
            }
            if (hi / lo - 1.0 < 1e-4) break;
            const double shrink = std::pow(hi / lo, 0.5 / 4.0);
            lo = std::max(ctx.qMin, bestQ / shrink);
            hi = std::min(ctx.qMax, bestQ * shrink);
        }
        QMaxPoint point;
        point.combinedDetuningOverGammaStar = d / ctx.emitter.gammaStar;
        point.qMax = bestQ;
        point.ibAtQMax = bestV;
        point.onBoundary = bestQ < ctx.qMin * 1.02 || bestQ > ctx.qMax / 1.02;
        curve.push_back(point);
    }
    return curve;
}

} // namespace spsfom::sweep
