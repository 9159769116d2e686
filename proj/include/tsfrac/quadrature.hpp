#pragma once

#include <functional>

// Adaptive Gauss-Kronrod 7/15 quadrature, plus change-of-variable wrappers for
// the weakly singular endpoint kernels that fractional operators produce.

namespace tsfrac {

using RealFn = std::function<double(double)>;

struct QuadratureSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    int max_subdivisions = 2000;
    /// Exponent gamma of a known (b - s)^gamma endpoint weight, gamma in (-1, 0].
    /// Only delta_integral consults this; 0 means no weight.
    double endpoint_exponent = 0.0;

    void validate() const; // throws tsfrac::Error on out-of-range settings
};

/// Globally adaptive GK15 on [a, b]. The integrand must be finite at every
/// quadrature node. Throws QuadratureFailure when the subdivision budget is
/// exhausted before the error estimate meets max(abs_tol, rel_tol * |I|).
double integrate_adaptive(const RealFn& f, double a, double b, const QuadratureSpec& q);

/// Integral of f over [a, b] where f(s) ~ (b - s)^gamma * (smooth) near s = b,
/// gamma = q.endpoint_exponent in (-1, 0). Uses the exact substitution
/// u = (b - s)^(gamma + 1), under which the weight integrates cleanly.
double integrate_endpoint_weighted(const RealFn& f, double a, double b,
                                   const QuadratureSpec& q);

/// Integral over [A, B] of (zt - z(s))^gamma * z'(s) * h(s) ds for a strictly
/// increasing z with z(B) <= zt. Computed in w = (zt - z(s))^(gamma + 1) space,
/// where the kernel and z' are absorbed exactly:
///     (1/(gamma+1)) * integral of h(s(w)) dw  over  [w(B), w(A)].
/// s(w) is recovered by bracketed inverse iteration on z, so h is the only
/// factor that quadrature has to resolve. Handles B == t (w(B) = 0, the
/// singular case) and interior segments alike.
double integrate_kernel_weighted(const RealFn& h, const RealFn& z, double zt,
                                 double gamma, double A, double B,
                                 const QuadratureSpec& q);

/// Inverse of a strictly increasing z on [lo, hi]: the s with z(s) = target.
/// Regula falsi (Illinois); exact after one step for affine z.
double invert_increasing(const RealFn& z, double target, double lo, double hi,
                         double z_lo, double z_hi);

} // namespace tsfrac
