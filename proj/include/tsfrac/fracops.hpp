#pragma once

#include <functional>
#include <vector>

#include "tsfrac/expr.hpp"
#include "tsfrac/quadrature.hpp"
#include "tsfrac/timescale.hpp"

// Riemann-Liouville fractional integrals and derivatives on a time scale,
// both classical and generalized (taken with respect to an increasing weight
// function z). All operators share one kernel primitive: the delta integral
// of (z(t) - z(s))^gamma z^Delta(s) h(s) over [a, t).

namespace tsfrac {

/// Common parameters of a fractional operator.
struct FracOpSpec {
    double alpha = 0.5;     // order, in (0, 1)
    double a = 0.0;         // base point; must lie in the scale
    ExprFn z = ExprFn::identity(); // weight; identity gives the classical operators
    TimeScale scale = TimeScale::real_interval(0.0, 1.0);
    QuadratureSpec quad{};

    /// Range/membership checks plus a monotonicity sweep of z over [a, b]:
    /// z^Delta at every scattered point and run midpoint must be positive and
    /// above 1e-12. Throws NonMonotoneWeight / PointNotInScale / Error.
    void validate(double b) const;
};

/// Values on a strictly increasing node set, evaluated elsewhere by clamped
/// piecewise-linear interpolation. Solver grids keep every scattered point a
/// node, so interpolation only ever happens inside continuous runs.
class GridFunction {
public:
    GridFunction(std::vector<double> nodes, std::vector<double> values);

    double operator()(double s) const;

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> nodes_;
    std::vector<double> values_;
};

/// Delta integral over [a, t) of (z(t) - z(s))^gamma z^Delta(s) h(s).
/// Scattered points contribute (z(t)-z(s))^gamma (z(sigma(s))-z(s)) h(s)
/// exactly (the graininess cancels against the jump quotient); continuous
/// runs are integrated in kernel-absorbing w-space. Building block for every
/// operator below and for solver residual checks.
double weighted_kernel_integral(const ExprFn& z, const TimeScale& scale,
                                const QuadratureSpec& q, double a, double t,
                                double gamma, const RealFn& h);

/// Classical RL integral of order alpha: kernel (t - s)^(alpha-1), z = id.
/// spec.z is ignored. t must lie in the scale, t >= a.
double frac_integral(const FracOpSpec& spec, const RealFn& h, double t);

/// Classical RL derivative: delta derivative of the order-(1-alpha) kernel
/// integral, divided by Gamma(1 - alpha). t must lie in T^kappa.
double frac_derivative(const FracOpSpec& spec, const RealFn& h, double t);

/// Generalized RL integral with respect to spec.z.
double gen_frac_integral(const FracOpSpec& spec, const RealFn& h, double t);

/// Generalized RL derivative: (1 / z^Delta(t)) * delta derivative of the
/// order-(1-alpha) weighted kernel integral, divided by Gamma(1 - alpha).
/// Throws ZeroWeightDerivative when |z^Delta(t)| <= 1e-12.
double gen_frac_derivative(const FracOpSpec& spec, const RealFn& h, double t);

/// I^alpha[I^beta h](t) - I^(alpha+beta)[h](t) for the generalized integrals.
/// Zero on T = R; generally nonzero on scales with jumps. Requires
/// alpha, beta > 0 and alpha + beta <= 1.
double semigroup_defect(const FracOpSpec& spec, const RealFn& h, double alpha,
                        double beta, double t);

} // namespace tsfrac
