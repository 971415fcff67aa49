#pragma once

// Canonical unit system for all rate quantities.
//
// Every rate (kappa, gamma_r, gamma_nr, gamma*, gamma_q, g, R, omega, ...)
// is stored as an angular rate in inverse picoseconds. A quantity quoted
// as "2pi x 500 GHz" enters as the ordinary frequency 500 GHz and is
// stored as 2*pi*500e-3 ps^-1. Lifetimes quoted in nanoseconds convert
// directly as rate = 1/(1000*tau_ns) with no 2pi factor.

#include <cmath>
#include <stdexcept>
#include <string>

namespace spsfom {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Speed of light in nm/ps.
inline constexpr double kSpeedOfLightNmPerPs = 299792.458;

// Angular rate in ps^-1. Value type; negative values are rejected for
// physical rates at the parameter-container level, not here, so that
// intermediate arithmetic (detunings, differences) stays expressible.
class Rate {
public:
    constexpr Rate() = default;
    constexpr explicit Rate(double angularPerPs) : value_(angularPerPs) {}

    static constexpr Rate fromAngularPerPs(double x) { return Rate(x); }

    // Ordinary frequency f -> angular rate 2*pi*f.
    static constexpr Rate fromFrequencyGHz(double f) { return Rate(kTwoPi * f * 1e-3); }
    static constexpr Rate fromFrequencyTHz(double f) { return Rate(kTwoPi * f); }

    // Exponential lifetime tau -> decay rate 1/tau (no 2*pi).
    static Rate fromLifetimeNs(double tauNs) {
        if (!(tauNs > 0.0)) throw std::domain_error("lifetime must be positive");
        return Rate(1.0 / (1e3 * tauNs));
    }

    // Optical resonance given as a vacuum wavelength.
    static Rate fromWavelengthNm(double lambdaNm) {
        if (!(lambdaNm > 0.0)) throw std::domain_error("wavelength must be positive");
        return Rate(kTwoPi * kSpeedOfLightNmPerPs / lambdaNm);
    }

    constexpr double value() const { return value_; }
    constexpr double toFrequencyGHz() const { return value_ / kTwoPi * 1e3; }
    constexpr double toFrequencyTHz() const { return value_ / kTwoPi; }
    double toLifetimeNs() const {
        if (!(value_ > 0.0)) throw std::domain_error("rate must be positive to invert");
        return 1.0 / (1e3 * value_);
    }
    double toWavelengthNm() const {
        if (!(value_ > 0.0)) throw std::domain_error("rate must be positive to invert");
        return kTwoPi * kSpeedOfLightNmPerPs / value_;
    }

    friend constexpr Rate operator+(Rate a, Rate b) { return Rate(a.value_ + b.value_); }
    friend constexpr Rate operator-(Rate a, Rate b) { return Rate(a.value_ - b.value_); }
    friend constexpr Rate operator*(double s, Rate r) { return Rate(s * r.value_); }
    friend constexpr Rate operator*(Rate r, double s) { return Rate(s * r.value_); }
    friend constexpr Rate operator/(Rate r, double s) { return Rate(r.value_ / s); }
    friend constexpr double operator/(Rate a, Rate b) { return a.value_ / b.value_; }
    friend constexpr bool operator==(Rate a, Rate b) { return a.value_ == b.value_; }
    friend constexpr auto operator<=>(Rate a, Rate b) { return a.value_ <=> b.value_; }

private:
    double value_ = 0.0;
};

} // namespace spsfom
