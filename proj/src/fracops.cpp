#include "tsfrac/fracops.hpp"
#include "tsfrac/calculus.hpp"
#include "tsfrac/errors.hpp"
#include "tsfrac/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tsfrac {
namespace {

struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x)
    {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

void check_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error("fracops", "order alpha must lie in (0, 1), got " + std::to_string(alpha));
}

const ExprFn& identity_weight()
{
    static const ExprFn id = ExprFn::identity();
    return id;
}

// Derivative resolution inside Richardson extrapolation needs the inner
// integrals a few orders tighter than the requested tolerance, otherwise the
// extrapolation diagonal stalls on quadrature noise right at its 1e-6
// convergence threshold.
QuadratureSpec tightened(QuadratureSpec q)
{
    q.rel_tol = std::max(q.rel_tol * 1e-3, 1e-12);
    q.abs_tol = std::max(q.abs_tol * 1e-3, 1e-13);
    q.max_subdivisions = std::max(q.max_subdivisions * 4, 8000);
    q.endpoint_exponent = 0.0;
    return q;
}

} // namespace

namespace {

void validate_weight(const ExprFn& z, const TimeScale& scale, double a, double b)
{
    if (z.arity() != 1)
        throw Error("fracops", "weight z must be a function of a single variable");
    const double va = scale.snap(a);
    const double vb = scale.snap(b);
    if (vb < va)
        throw Error("fracops", "evaluation point lies below the base point");
    for (const auto& [s, mu] : scale.scattered_points(va, vb)) {
        const double quot = (z(s + mu) - z(s)) / mu;
        if (!(quot > 1e-12))
            throw NonMonotoneWeight("z^Delta = " + std::to_string(quot) +
                                    " at scattered point t = " + std::to_string(s) +
                                    "; z must be strictly increasing");
    }
    for (const ClosedInterval& run : scale.continuous_runs(va, vb)) {
        const double m = 0.5 * (run.lo + run.hi);
        const double d = 1e-6 * (1.0 + std::abs(m));
        const double quot = (z(m + d) - z(m - d)) / (2.0 * d);
        if (!(quot > 1e-12))
            throw NonMonotoneWeight("z^Delta = " + std::to_string(quot) +
                                    " at segment midpoint t = " + std::to_string(m) +
                                    "; z must be strictly increasing");
    }
}

} // namespace

void FracOpSpec::validate(double b) const
{
    check_alpha(alpha);
    validate_weight(z, scale, a, b);
}

GridFunction::GridFunction(std::vector<double> nodes, std::vector<double> values)
    : nodes_(std::move(nodes)), values_(std::move(values))
{
    if (nodes_.empty() || nodes_.size() != values_.size())
        throw Error("fracops", "grid function needs matching nonempty node/value lists");
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
        if (!(nodes_[i + 1] > nodes_[i]))
            throw Error("fracops", "grid nodes must be strictly increasing");
    for (double v : values_)
        if (!std::isfinite(v))
            throw Error("fracops", "grid function has a non-finite value");
}

double GridFunction::operator()(double s) const
{
    if (s <= nodes_.front())
        return values_.front();
    if (s >= nodes_.back())
        return values_.back();
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
    const double x0 = nodes_[i - 1], x1 = nodes_[i];
    const double w = (s - x0) / (x1 - x0);
    return values_[i - 1] * (1.0 - w) + values_[i] * w;
}

double weighted_kernel_integral(const ExprFn& z, const TimeScale& scale,
                                const QuadratureSpec& q, double a, double t,
                                double gamma, const RealFn& h)
{
    const double va = scale.snap(a);
    const double vt = scale.snap(t);
    if (vt < va)
        throw Error("fracops", "upper limit t below base point a");
    if (vt == va)
        return 0.0;
    const double zt = z(vt);

    KahanSum acc;
    for (const auto& [s, mu] : scale.scattered_points(va, vt)) {
        const double zs = z(s);
        const double zsig = z(s + mu);
        const double base = zt - zs;
        if (!(base > 0.0))
            throw NonMonotoneWeight("z(t) - z(s) is not positive at scattered s = " +
                                    std::to_string(s));
        acc.add(std::pow(base, gamma) * (zsig - zs) * h(s));
    }
    const RealFn zf = [&z](double s) { return z(s); };
    for (const ClosedInterval& run : scale.continuous_runs(va, vt))
        acc.add(integrate_kernel_weighted(h, zf, zt, gamma, run.lo, run.hi, q));
    return acc.sum;
}

double frac_integral(const FracOpSpec& spec, const RealFn& h, double t)
{
    check_alpha(spec.alpha);
    return weighted_kernel_integral(identity_weight(), spec.scale, spec.quad, spec.a, t,
                                    spec.alpha - 1.0, h) /
           gamma_fn(spec.alpha);
}

double frac_derivative(const FracOpSpec& spec, const RealFn& h, double t)
{
    check_alpha(spec.alpha);
    const double vt = spec.scale.snap(t);
    const double va = spec.scale.snap(spec.a);
    const QuadratureSpec tight = tightened(spec.quad);
    const RealFn w = [&](double tau) {
        return weighted_kernel_integral(identity_weight(), spec.scale, tight, va, tau,
                                        -spec.alpha, h);
    };
    return delta_derivative(w, spec.scale, vt) / gamma_fn(1.0 - spec.alpha);
}

double gen_frac_integral(const FracOpSpec& spec, const RealFn& h, double t)
{
    spec.validate(t);
    return weighted_kernel_integral(spec.z, spec.scale, spec.quad, spec.a, t,
                                    spec.alpha - 1.0, h) /
           gamma_fn(spec.alpha);
}

double gen_frac_derivative(const FracOpSpec& spec, const RealFn& h, double t)
{
    spec.validate(t);
    const double vt = spec.scale.snap(t);
    const double va = spec.scale.snap(spec.a);
    const RealFn zf = [&](double s) { return spec.z(s); };
    const double zd_t = delta_derivative(zf, spec.scale, vt);
    if (std::abs(zd_t) <= 1e-12)
        throw ZeroWeightDerivative(vt);
    const QuadratureSpec tight = tightened(spec.quad);
    const RealFn v = [&](double tau) {
        return weighted_kernel_integral(spec.z, spec.scale, tight, va, tau, -spec.alpha, h);
    };
    return delta_derivative(v, spec.scale, vt) / (gamma_fn(1.0 - spec.alpha) * zd_t);
}

double semigroup_defect(const FracOpSpec& spec, const RealFn& h, double alpha,
                        double beta, double t)
{
    if (!(alpha > 0.0) || !(beta > 0.0) || alpha + beta > 1.0 + 1e-12)
        throw Error("fracops", "semigroup defect needs alpha, beta > 0 with alpha + beta <= 1");
    validate_weight(spec.z, spec.scale, spec.a, t);

    const double va = spec.scale.snap(spec.a);
    const double vt = spec.scale.snap(t);
    const QuadratureSpec inner_q = tightened(spec.quad);

    const double inv_gamma_beta = reciprocal_gamma(beta);
    const RealFn inner = [&](double s) {
        return weighted_kernel_integral(spec.z, spec.scale, inner_q, va, s, beta - 1.0, h) *
               inv_gamma_beta;
    };
    const double lhs =
        weighted_kernel_integral(spec.z, spec.scale, spec.quad, va, vt, alpha - 1.0, inner) *
        reciprocal_gamma(alpha);
    const double rhs =
        weighted_kernel_integral(spec.z, spec.scale, spec.quad, va, vt, alpha + beta - 1.0, h) *
        reciprocal_gamma(alpha + beta);
    return lhs - rhs;
}

} // namespace tsfrac
