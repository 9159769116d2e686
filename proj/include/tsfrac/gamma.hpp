#pragma once

// Gamma function via the Lanczos approximation (13-term rational, g chosen for
// IEEE doubles). Relative error is a few ulp across the range used here; the
// test suite pins <= 1e-12 against an independent reference on [0.5, 20].

namespace tsfrac {

// Gamma(x) for real x. Poles (x = 0, -1, -2, ...) raise DomainError.
// x < 0.5 goes through the reflection formula.
double gamma_fn(double x);

// 1 / Gamma(x); finite (zero) at the poles.
double reciprocal_gamma(double x);

} // namespace tsfrac
