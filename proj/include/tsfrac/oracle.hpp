#pragma once

#include "tsfrac/solver.hpp"

// Reference implementations used by the tests to cross-check the main
// operators. Everything here is computed by a separate route: closed forms,
// exact finite sums, or product-integration time stepping. None of it calls
// the adaptive quadrature, the delta calculus, or the fractional operator
// code paths.

namespace tsfrac::oracle {

/// Classical Riemann-Liouville integral of t^nu on the reals:
/// Gamma(nu+1) / Gamma(nu+1+alpha) * t^(nu+alpha).
double rl_power_rule(double alpha, double nu, double t);

/// Exact fractional integral on a pure-point scale: the finite sum
/// (1/Gamma(alpha)) * sum over scattered s in [a, t) of
/// (z(t)-z(s))^(alpha-1) * (z(sigma(s))-z(s)) * h(s), accumulated
/// left-to-right in long double. Throws ScaleHasContinuousPart if any
/// interval piece meets [a, t].
double discrete_frac_sum(const TimeScale& scale, double alpha, const ExprFn& z,
                         const ExprFn& h, double a, double t);

/// Dense-grid solver for the integral equation
///   y(t) = (z'(t)/Gamma(alpha)) * Int_{t0}^{t} (z(t)-z(s))^(alpha-1) z'(s)
///          f(s, y(s)) ds
/// on a single real interval: substitute v = z(s) and integrate the power
/// kernel exactly against a piecewise-linear interpolant of f(s, y(s))
/// (product integration), stepping node by node on a uniform grid of grid_n
/// points with an implicit scalar solve at each step.
GridFunction volterra_dense_solve(const IVProblem& p, int grid_n);

} // namespace tsfrac::oracle
