#pragma once

// Closed-form Markovian figures of merit for a two-level emitter coupled to
// a lossy cavity mode with pure dephasing and plasmon quenching:
//
//   beta  = R*kappa / [R(gamma+kappa) + gamma(gamma+gamma*+kappa)]
//   I     = I0 + I1  (perturbative in gamma*/(kappa+gamma), beta exact)
//
// with R = 4g^2/kappa and gamma = gamma_r + gamma_nr + gamma_q. The
// first-order correction is evaluated as a cleared rational expression in
// which the Gamma2^2 = 3*gamma*(gamma-gamma*) + 4*gamma*(gamma+R) factor of
// the grouped form cancels exactly, so no parameter point is singular.

#include <cmath>
#include <stdexcept>

#include "spsfom/params.hpp"
#include "spsfom/units.hpp"

namespace spsfom::markov {

enum class Method { FullPerturbative, SimplifiedEq5, NumericOracle };

inline const char* methodName(Method m) {
    switch (m) {
        case Method::FullPerturbative: return "full";
        case Method::SimplifiedEq5: return "simplified";
        case Method::NumericOracle: return "oracle";
    }
    return "?";
}

struct RegimeLabel {
    bool critical = false;         // R > gamma* and kappa > gamma*
    bool strongCoupling = false;   // 2g > gamma + kappa + gamma*
    bool badCavity = false;        // 2g <= gamma + kappa + gamma* and kappa > gamma*
    bool quenchDominated = false;  // gamma_q > kappa or gamma_q > R

    friend bool operator==(const RegimeLabel&, const RegimeLabel&) = default;
};

struct ValidityFlags {
    bool perturbativeOK = true;  // gamma*/(kappa+gamma) < 1
    bool simplifiedOK = true;    // gamma < gamma* < kappa
    bool quenchMarkovOK = true;  // per-mode coupling weak enough
};

// Quenching rate, Eq. (6): sum over higher-order modes of
// g_l^2 kappa_nr / (Delta_l^2 + (kappa_nr/2)^2) with g_l = k_l g; the
// effective-detuning form is g^2 kappa_nr / Delta_q^2.
inline Rate quenchRate(const QuenchModel& model, Rate g, Rate kappaNR) {
    if (model.empty()) return Rate(0.0);
    const double knr = kappaNR.value();
    if (model.isPerMode()) {
        double total = 0.0;
        for (const auto& m : model.modes()) {
            const double gl = m.k * g.value();
            const double d = m.delta.value();
            total += gl * gl * knr / (d * d + 0.25 * knr * knr);
        }
        return Rate(total);
    }
    const double dq = model.toEffectiveDetuning().value();
    return Rate(g.value() * g.value() * knr / (dq * dq));
}

// Near-resonant closed limit gamma_q ~ (4g^2/kappa_nr) sum k_l^2.
// Diagnostic only; the compute path is always the Lorentzian sum above.
inline Rate quenchRateNearResonantLimit(const QuenchModel& model, Rate g, Rate kappaNR) {
    if (!model.isPerMode()) throw std::domain_error("near-resonant limit needs per-mode form");
    if (!(kappaNR.value() > 0.0)) throw std::domain_error("kappa_nr must be positive");
    double kSq = 0.0;
    for (const auto& m : model.modes()) kSq += m.k * m.k;
    return Rate(4.0 * g.value() * g.value() / kappaNR.value() * kSq);
}

// Cavity efficiency, Eq. (3). Exact in all Markovian regimes.
inline double betaEfficiency(const EmitterParams& emitter, const CavityParams& cavity,
                             Rate gammaQ) {
    const double kappa = cavity.kappa.value();
    if (!(kappa > 0.0)) throw std::domain_error("betaEfficiency: kappa must be positive");
    const double g = cavity.g.value();
    if (g == 0.0) return 0.0;
    const double gamma = (emitter.bareDecay() + gammaQ).value();
    const double gs = emitter.gammaStar.value();
    const double fourG2 = 4.0 * g * g;
    return fourG2 * kappa / (fourG2 * (gamma + kappa) + gamma * kappa * (gamma + kappa + gs));
}

namespace detail {

struct RateSet {
    double r;      // R = 4g^2/kappa
    double kappa;
    double gs;     // gamma*
    double gamma;  // gamma_r + gamma_nr + gamma_q
};

inline RateSet rates(const EmitterParams& emitter, const CavityParams& cavity, Rate gammaQ) {
    const double kappa = cavity.kappa.value();
    const double g = cavity.g.value();
    if (!(kappa > 0.0)) throw std::domain_error("kappa must be positive");
    if (!(g > 0.0)) throw std::domain_error("indistinguishability needs g > 0");
    return {4.0 * g * g / kappa, kappa, emitter.gammaStar.value(),
            (emitter.bareDecay() + gammaQ).value()};
}

inline double betaOf(const RateSet& p) {
    return p.r * p.kappa /
           (p.r * (p.gamma + p.kappa) + p.gamma * (p.gamma + p.gs + p.kappa));
}

// Shared pieces of Eqs. (S10)-(S11).
inline double gamma1Sq(const RateSet& p) {
    return (3.0 * p.gamma + p.kappa) * (p.gamma + 3.0 * p.kappa) + 4.0 * p.kappa * p.r;
}

inline double zerothNumeratorFactor(const RateSet& p) {
    return 3.0 * p.gs * (2.0 * p.gamma + 3.0 * p.kappa + p.gs) + gamma1Sq(p);
}

inline double indistZeroth(const RateSet& p) {
    const double beta = betaOf(p);
    const double rk = p.r * p.kappa;
    const double den = (p.r + p.gamma) * (p.kappa + p.gamma) * (p.r + p.gamma + p.gs) *
                       (p.kappa + p.gamma + p.gs) * gamma1Sq(p);
    return rk * rk * zerothNumeratorFactor(p) / den / (beta * beta);
}

// I1/(gamma* I0) with the removable Gamma2^2 factor cancelled. The grouped
// three-term form of Eq. (S11) reads t1 - t2 - t3 with t1, t2 sharing the
// Gamma2^2 denominator; their combination reduces exactly to
// q / [2(gamma+kappa)(gamma+R) N] where N is the zeroth numerator factor and
//   q = -[ 2R^2 kappa + R((gamma+gamma*)^2 + kappa(8 gamma + 3 gamma* + kappa))
//          + 4 gamma((gamma+gamma*)^2 + 3 kappa(gamma+gamma*) + kappa^2) ].
inline double firstOrderCorrectionRatio(const RateSet& p) {
    const double gpgs = p.gamma + p.gs;
    const double q = -(2.0 * p.r * p.r * p.kappa +
                       p.r * (gpgs * gpgs + p.kappa * (8.0 * p.gamma + 3.0 * p.gs + p.kappa)) +
                       4.0 * p.gamma * (gpgs * gpgs + 3.0 * p.kappa * gpgs + p.kappa * p.kappa));
    const double t12 = q / (2.0 * (p.gamma + p.kappa) * (p.gamma + p.r) * zerothNumeratorFactor(p));
    const double t3 = (p.gamma + p.kappa) * (8.0 * p.gamma + 5.0 * p.r) /
                      (2.0 * (p.gamma + p.r) * gamma1Sq(p));
    return t12 - t3;
}

} // namespace detail

// Zeroth-order indistinguishability, Eq. (S10).
inline double indistZeroth(const EmitterParams& emitter, const CavityParams& cavity, Rate gammaQ) {
    return detail::indistZeroth(detail::rates(emitter, cavity, gammaQ));
}

// I0 + I1, exact to first order in gamma*/(kappa+gamma). Default method.
inline double indistFirstOrder(const EmitterParams& emitter, const CavityParams& cavity,
                               Rate gammaQ) {
    const auto p = detail::rates(emitter, cavity, gammaQ);
    const double i0 = detail::indistZeroth(p);
    return i0 * (1.0 + p.gs * detail::firstOrderCorrectionRatio(p));
}

// Eq. (5), the gamma < gamma* < kappa simplification.
inline double indistSimplified(const EmitterParams& emitter, const CavityParams& cavity,
                               Rate gammaQ) {
    const auto p = detail::rates(emitter, cavity, gammaQ);
    const double beta = detail::betaOf(p);
    const double i1 = (p.gs / p.kappa) * (6.0 * p.kappa - p.r) / (3.0 * p.kappa + 4.0 * p.r);
    const double rk = p.r * p.kappa;
    const double den = (p.r + p.gamma) * (p.kappa + p.gamma) * (p.r + p.gamma + p.gs) *
                       (p.kappa + p.gamma + p.gs);
    return rk * rk * (1.0 + i1) / den / (beta * beta);
}

// Ties (equalities) resolve to the bad-cavity / non-critical side.
inline RegimeLabel classifyRegime(const EmitterParams& emitter, const CavityParams& cavity,
                                  Rate gammaQ) {
    const double g = cavity.g.value();
    const double kappa = cavity.kappa.value();
    const double r = cavity.transferRate().value();
    const double gs = emitter.gammaStar.value();
    const double gamma = (emitter.bareDecay() + gammaQ).value();
    RegimeLabel label;
    label.critical = r > gs && kappa > gs;
    label.strongCoupling = 2.0 * g > gamma + kappa + gs;
    label.badCavity = !label.strongCoupling && kappa > gs;
    label.quenchDominated = gammaQ.value() > kappa || gammaQ.value() > r;
    return label;
}

inline ValidityFlags validityFlags(const EmitterParams& emitter, const CavityParams& cavity,
                                   const QuenchModel& quench, Rate gammaQ) {
    const double kappa = cavity.kappa.value();
    const double gs = emitter.gammaStar.value();
    const double gamma = (emitter.bareDecay() + gammaQ).value();
    ValidityFlags flags;
    flags.perturbativeOK = gs < kappa + gamma;
    flags.simplifiedOK = gamma < gs && gs < kappa;
    flags.quenchMarkovOK = quench.markovianValid(cavity.g, cavity.kappaNR());
    return flags;
}

struct OptimalCavity {
    Rate gMax;
    Rate kappaMax;
    Rate gammaQAtMax;
    bool smallRatioOK = true;  // gamma* <= Delta_q / 10
};

// Closed-form Ibeta maximizer in the mode-detuned case:
// kappa_max = 2 g_max = [Delta_q^2 gamma* / (1 - eta_r)]^(1/3); the quench
// rate at that point equals gamma*/4 identically.
inline OptimalCavity optimalCavity(Rate gammaStar, Rate deltaQ, double etaR) {
    if (!(gammaStar.value() > 0.0)) throw std::domain_error("gammaStar must be positive");
    if (!(deltaQ.value() > 0.0)) throw std::domain_error("deltaQ must be positive");
    if (!(etaR >= 0.0 && etaR < 1.0))
        throw std::domain_error("optimalCavity requires etaR in [0,1); the quench-free cavity has no finite maximizer");
    const double dq = deltaQ.value();
    const double kappaMax = std::cbrt(dq * dq * gammaStar.value() / (1.0 - etaR));
    OptimalCavity result;
    result.kappaMax = Rate(kappaMax);
    result.gMax = Rate(kappaMax / 2.0);
    result.gammaQAtMax =
        Rate(result.gMax.value() * result.gMax.value() * kappaMax * (1.0 - etaR) / (dq * dq));
    result.smallRatioOK = gammaStar.value() <= dq / 10.0;
    return result;
}

struct FomResult {
    double beta = 0.0;
    double indist = 0.0;
    double product = 0.0;  // beta * indist
    RegimeLabel regime;
    ValidityFlags validity;
    Rate quenchRate{0.0};
    Method method = Method::FullPerturbative;
};

// Assembled single-point evaluation used by the CLI and the sweep engine.
// The numeric-oracle method is wired in by the caller (bloch module) to keep
// this header free of the linear-algebra dependency.
inline FomResult computeFom(const EmitterParams& emitter, const CavityParams& cavity,
                            const QuenchModel& quench, Method method = Method::FullPerturbative) {
    const Rate gq = quenchRate(quench, cavity.g, cavity.kappaNR());
    FomResult result;
    result.quenchRate = gq;
    result.method = method;
    result.beta = betaEfficiency(emitter, cavity, gq);
    switch (method) {
        case Method::SimplifiedEq5:
            result.indist = indistSimplified(emitter, cavity, gq);
            break;
        case Method::FullPerturbative:
        case Method::NumericOracle:
            result.indist = indistFirstOrder(emitter, cavity, gq);
            break;
    }
    result.product = result.beta * result.indist;
    result.regime = classifyRegime(emitter, cavity, gq);
    result.validity = validityFlags(emitter, cavity, quench, gq);
    return result;
}

} // namespace spsfom::markov
