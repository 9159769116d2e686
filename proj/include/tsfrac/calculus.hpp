#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "tsfrac/quadrature.hpp"
#include "tsfrac/timescale.hpp"

// Delta calculus on a time scale: derivatives, integrals, and the step
// extension of a scale function to the enclosing real interval.

namespace tsfrac {

/// Delta derivative of f at t in T^kappa.
///   - right-scattered t: the exact jump quotient (f(sigma(t)) - f(t)) / mu(t)
///   - dense t: one-sided difference quotients extrapolated in h (Richardson,
///     step halved from min(segment room, 1e-3), up to 8 halvings); the
///     left-sided variant is used at a left-dense maximum.
/// Throws NotInKappa at a left-scattered maximum, NoConvergence when the
/// extrapolation diagonal never settles to 1e-6 relative.
double delta_derivative(const RealFn& f, const TimeScale& scale, double t);

/// Cauchy delta integral of f over [a, b), a and b in T: the sum of
/// f(t) * mu(t) over right-scattered t plus ordinary adaptive integrals over
/// the continuous runs. If q.endpoint_exponent < 0, the run touching b is
/// integrated with the (b - s)^gamma endpoint substitution.
double delta_integral(const RealFn& f, const TimeScale& scale, double a, double b,
                      const QuadratureSpec& q = {});

/// Left and right sides of the identity
///   int_a^b f = (sigma(a) - a) f(a) + int_sigma(a)^b f.
std::pair<double, double> split_identity_check(const RealFn& f, const TimeScale& scale,
                                               double a, double b,
                                               const QuadratureSpec& q = {});

/// Step extension of an increasing continuous scale function to [a, b]:
/// F = f on T, and F(s) = f(t) on each gap (t, sigma(t)). Monotonicity is
/// spot-checked on scale samples at construction (throws NotIncreasing).
class RealExtension {
public:
    RealExtension(RealFn f, const TimeScale& scale, double a, double b);

    double operator()(double s) const;

    /// Ordinary real integral of the extension over [a, b]: adaptive on the
    /// continuous runs, exact rectangles across the gaps.
    double integrate(const QuadratureSpec& q = {}) const;

    double lo() const { return a_; }
    double hi() const { return b_; }

private:
    RealFn f_;
    TimeScale scale_;
    double a_, b_;
};

RealExtension extend_to_reals(RealFn f, const TimeScale& scale, double a, double b);

} // namespace tsfrac
