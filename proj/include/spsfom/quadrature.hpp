#pragma once

// Thin adaptive-quadrature layer shared by the numeric oracle and the
// spectral module. Finite intervals go straight to an adaptive 15-point
// Gauss-Kronrod rule; semi-infinite integrals use the rational map
// s = scale * u / (1 - u), which turns exponential or Lorentzian tails on
// [a, inf) into well-behaved integrands on [0, 1).

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spsfom::quad {

inline constexpr unsigned kMaxDepth = 15;

struct Result {
    double value = 0.0;
    double errorEstimate = 0.0;
};

template <typename F>
Result integrate(F&& f, double a, double b, double tol = 1e-10) {
    Result r;
    r.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        std::forward<F>(f), a, b, kMaxDepth, tol, &r.errorEstimate);
    return r;
}

// integral_a^inf f(s) ds with the substitution s = a + scale*u/(1-u).
template <typename F>
Result integrateSemiInfinite(F&& f, double a, double scale, double tol = 1e-10) {
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw std::domain_error("semi-infinite quadrature needs a positive finite scale");
    auto mapped = [&f, a, scale](double u) {
        const double oneMinus = 1.0 - u;
        const double s = a + scale * u / oneMinus;
        const double jac = scale / (oneMinus * oneMinus);
        return f(s) * jac;
    };
    Result r;
    r.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        mapped, 0.0, 1.0, kMaxDepth, tol, &r.errorEstimate);
    return r;
}

// Full-line integral through both rational tail maps around a center point:
// f over (-inf, center] is folded as f(-s) over [-center, inf).
template <typename F>
Result integrateRealLine(F&& f, double center, double scale, double tol = 1e-10) {
    const Result right = integrateSemiInfinite(f, center, scale, tol);
    const Result left =
        integrateSemiInfinite([&f](double s) { return f(-s); }, -center, scale, tol);
    Result r;
    r.value = right.value + left.value;
    r.errorEstimate = right.errorEstimate + left.errorEstimate;
    return r;
}

} // namespace spsfom::quad
