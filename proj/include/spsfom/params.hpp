#pragma once

// Parameter containers for the emitter, the dominant cavity mode and the
// higher-order (quenching) plasmon modes. All containers are immutable
// value objects; gamma = gamma_r + gamma_nr + gamma_q is assembled at call
// sites because the quenching rate varies per cavity point during sweeps.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "spsfom/units.hpp"

namespace spsfom {

struct EmitterParams {
    Rate gammaR;     // radiative decay
    Rate gammaNR;    // intrinsic non-radiative decay (excludes quenching)
    Rate gammaStar;  // pure dephasing
    Rate omega0;     // optical resonance (angular)

    Rate bareDecay() const { return gammaR + gammaNR; }

    friend bool operator==(const EmitterParams&, const EmitterParams&) = default;
};

// R = gamma_r * P.
inline Rate purcellToR(double purcell, Rate gammaR) {
    if (!(purcell >= 0.0)) throw std::domain_error("Purcell factor must be nonnegative");
    if (!(gammaR.value() > 0.0)) throw std::domain_error("gammaR must be positive");
    return purcell * gammaR;
}

// P = (3/4pi^2) (lambda/n)^3 (Q/V), then R = gamma_r * P. Lengths in nm,
// volume in nm^3.
inline Rate rFromMode(double lambdaNm, double refractiveIndex, double q, double volumeNm3,
                      Rate gammaR) {
    if (!(lambdaNm > 0.0 && refractiveIndex > 0.0 && q > 0.0 && volumeNm3 > 0.0))
        throw std::domain_error("mode parameters must be positive");
    const double reduced = lambdaNm / refractiveIndex;
    const double purcell = 3.0 / (4.0 * kPi * kPi) * reduced * reduced * reduced * q / volumeNm3;
    return purcellToR(purcell, gammaR);
}

struct CavityParams {
    Rate g;        // coupling to the dominant radiating mode
    Rate kappa;    // total bare linewidth
    double etaR = 1.0;  // radiative fraction kappa_r/kappa

    // Construct from a Purcell-style transfer rate R = gamma_r * P at a
    // given quality factor: kappa = omega0/Q, g = sqrt(R*kappa)/2.
    static CavityParams fromPurcell(double purcell, Rate gammaR, Rate omega0, double q,
                                    double etaR) {
        if (!(q > 0.0)) throw std::domain_error("Q must be positive");
        if (!(omega0.value() > 0.0)) throw std::domain_error("omega0 must be positive");
        const Rate kappa = omega0 / q;
        const Rate r = purcellToR(purcell, gammaR);
        return {Rate(std::sqrt(r.value() * kappa.value()) / 2.0), kappa, etaR};
    }

    Rate transferRate() const { return Rate(4.0 * g.value() * g.value() / kappa.value()); }
    Rate kappaR() const { return etaR * kappa; }
    Rate kappaNR() const { return (1.0 - etaR) * kappa; }
    double qualityFactor(Rate omega0) const { return omega0 / kappa; }

    friend bool operator==(const CavityParams&, const CavityParams&) = default;
};

// Higher-order plasmon mode description. Either an explicit list of modes
// (k_l, Delta_l) with g_l = k_l * g, or a single effective detuning Delta_q
// with 1/Delta_q^2 = sum k_l^2 / Delta_l^2. An empty model means no
// quenching channel.
class QuenchModel {
public:
    struct Mode {
        double k = 0.0;  // coupling fraction g_l/g
        Rate delta;      // detuning from the emitter, > 0

        friend bool operator==(const Mode&, const Mode&) = default;
    };

    QuenchModel() = default;

    static QuenchModel none() { return QuenchModel(); }

    static QuenchModel perMode(std::vector<Mode> modes) {
        for (const auto& m : modes) {
            if (!(m.k >= 0.0)) throw std::domain_error("mode coupling fraction must be >= 0");
            if (!(m.delta.value() > 0.0)) throw std::domain_error("mode detuning must be positive");
        }
        QuenchModel q;
        q.modes_ = std::move(modes);
        q.hasModes_ = true;
        return q;
    }

    static QuenchModel effectiveDetuning(Rate deltaQ) {
        if (!(deltaQ.value() > 0.0)) throw std::domain_error("effective detuning must be positive");
        QuenchModel q;
        q.deltaQ_ = deltaQ;
        q.hasEffective_ = true;
        return q;
    }

    bool empty() const { return !hasModes_ && !hasEffective_; }
    bool isPerMode() const { return hasModes_; }
    const std::vector<Mode>& modes() const { return modes_; }

    // Detuned-limit reduction 1/Delta_q^2 = sum k_l^2/Delta_l^2.
    Rate toEffectiveDetuning() const {
        if (hasEffective_) return deltaQ_;
        if (!hasModes_) throw std::domain_error("empty quench model has no effective detuning");
        double invSq = 0.0;
        for (const auto& m : modes_) {
            const double d = m.delta.value();
            invSq += m.k * m.k / (d * d);
        }
        if (!(invSq > 0.0)) throw std::domain_error("quench modes have zero total coupling");
        return Rate(1.0 / std::sqrt(invSq));
    }

    // Markovian validity: g_l^2/(Delta_l^2 + (kappa_nr/2)^2) < 1 per mode.
    bool markovianValid(Rate g, Rate kappaNR) const {
        const double knrHalfSq = 0.25 * kappaNR.value() * kappaNR.value();
        if (hasModes_) {
            for (const auto& m : modes_) {
                const double gl = m.k * g.value();
                const double d = m.delta.value();
                if (!(gl * gl / (d * d + knrHalfSq) < 1.0)) return false;
            }
            return true;
        }
        if (hasEffective_) {
            const double d = deltaQ_.value();
            return g.value() * g.value() / (d * d + knrHalfSq) < 1.0;
        }
        return true;
    }

    friend bool operator==(const QuenchModel& a, const QuenchModel& b) {
        return a.hasModes_ == b.hasModes_ && a.hasEffective_ == b.hasEffective_ &&
               a.modes_ == b.modes_ && a.deltaQ_ == b.deltaQ_;
    }

private:
    std::vector<Mode> modes_;
    Rate deltaQ_{0.0};
    bool hasModes_ = false;
    bool hasEffective_ = false;
};

struct ValidationReport {
    std::vector<std::string> violations;

    bool valid() const { return violations.empty(); }
};

inline ValidationReport validateParams(const EmitterParams& emitter, const CavityParams& cavity) {
    ValidationReport report;
    auto require = [&](bool ok, const char* message) {
        if (!ok) report.violations.emplace_back(message);
    };
    require(emitter.gammaR.value() > 0.0, "gammaR must be positive");
    require(emitter.gammaNR.value() >= 0.0, "gammaNR must be nonnegative");
    require(emitter.gammaStar.value() >= 0.0, "gammaStar must be nonnegative");
    require(emitter.omega0.value() > 0.0, "omega0 must be positive");
    require(cavity.kappa.value() > 0.0, "kappa must be positive");
    require(cavity.g.value() >= 0.0, "g must be nonnegative");
    require(cavity.etaR >= 0.0 && cavity.etaR <= 1.0, "etaR must lie in [0,1]");
    return report;
}

} // namespace spsfom
