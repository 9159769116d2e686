#include "tsfrac/calculus.hpp"
#include "tsfrac/errors.hpp"

#include <algorithm>
#include <array>
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

// Bounds of the interval piece containing a dense point v.
ClosedInterval containing_run(const TimeScale& scale, double v)
{
    for (const ScalePiece& p : scale.pieces()) {
        const auto* iv = std::get_if<ClosedInterval>(&p);
        if (iv && v >= iv->lo - TimeScale::kMembershipTol &&
            v <= iv->hi + TimeScale::kMembershipTol)
            return *iv;
    }
    throw PointNotInScale(v, "expected a dense point inside an interval piece");
}

// One-sided difference quotients extrapolated to h -> 0. The error of the
// one-sided quotient is a power series in h, so successive halvings feed a
// Neville tableau with ratio-2 elimination.
double richardson_one_sided(const RealFn& f, double v, double dir, double room)
{
    const double h0 = std::min(1e-3, room);
    const double f0 = f(v);
    constexpr int kLevels = 9;
    std::array<double, kLevels> prev_row{};
    double diag_prev = 0.0;
    double h = h0;
    for (int k = 0; k < kLevels; ++k, h *= 0.5) {
        std::array<double, kLevels> row{};
        row[0] = (f(v + dir * h) - f0) / (dir * h);
        double weight = 1.0;
        for (int j = 1; j <= k; ++j) {
            weight *= 2.0;
            row[j] = row[j - 1] + (row[j - 1] - prev_row[j - 1]) / (weight - 1.0);
        }
        const double diag = row[k];
        if (k >= 1) {
            const double gap = std::abs(diag - diag_prev);
            if (gap <= 1e-6 * std::max(std::abs(diag), std::abs(diag_prev)) + 1e-12)
                return diag;
        }
        diag_prev = diag;
        prev_row = row;
    }
    throw NoConvergence("difference quotients at t = " + std::to_string(v) +
                        " did not settle to 1e-6 relative after 8 halvings");
}

} // namespace

double delta_derivative(const RealFn& f, const TimeScale& scale, double t)
{
    const double v = scale.snap(t);
    const PointClass c = scale.classify(v);
    if (c.right_scattered) {
        const double sig = scale.sigma(v);
        return (f(sig) - f(v)) / (sig - v);
    }
    if (c.is_max && c.left_scattered)
        throw NotInKappa(v);
    const ClosedInterval seg = containing_run(scale, v);
    if (c.right_dense)
        return richardson_one_sided(f, v, +1.0, seg.hi - v);
    // left-dense maximum: approach from inside the segment
    return richardson_one_sided(f, v, -1.0, v - seg.lo);
}

double delta_integral(const RealFn& f, const TimeScale& scale, double a, double b,
                      const QuadratureSpec& q)
{
    q.validate();
    const double va = scale.snap(a);
    const double vb = scale.snap(b);
    if (vb < va)
        throw Error("calculus", "integration bounds out of order");
    if (vb == va)
        return 0.0;

    KahanSum acc;
    for (const auto& [s, mu] : scale.scattered_points(va, vb))
        acc.add(f(s) * mu);
    for (const ClosedInterval& run : scale.continuous_runs(va, vb)) {
        if (q.endpoint_exponent < 0.0 && run.hi == vb) {
            acc.add(integrate_endpoint_weighted(f, run.lo, run.hi, q));
        } else {
            QuadratureSpec plain = q;
            plain.endpoint_exponent = 0.0;
            acc.add(integrate_adaptive(f, run.lo, run.hi, plain));
        }
    }
    return acc.sum;
}

std::pair<double, double> split_identity_check(const RealFn& f, const TimeScale& scale,
                                               double a, double b, const QuadratureSpec& q)
{
    const double va = scale.snap(a);
    const double vb = scale.snap(b);
    if (vb < va)
        throw Error("calculus", "integration bounds out of order");
    if (vb == va)
        return {0.0, 0.0};
    const double lhs = delta_integral(f, scale, va, vb, q);
    const double sig = scale.sigma(va);
    const double rhs = (sig - va) * f(va) + delta_integral(f, scale, sig, vb, q);
    return {lhs, rhs};
}

RealExtension::RealExtension(RealFn f, const TimeScale& scale, double a, double b)
    : f_(std::move(f)), scale_(scale), a_(scale.snap(a)), b_(scale.snap(b))
{
    if (b_ < a_)
        throw Error("calculus", "extension bounds out of order");

    // Spot-check that f is increasing along the scale samples.
    std::vector<double> samples;
    for (const auto& [s, mu] : scale_.scattered_points(a_, b_))
        samples.push_back(s);
    for (const ClosedInterval& run : scale_.continuous_runs(a_, b_))
        for (int k = 0; k <= 10; ++k)
            samples.push_back(run.lo + (run.hi - run.lo) * k / 10.0);
    samples.push_back(b_);
    std::sort(samples.begin(), samples.end());

    std::vector<double> vals;
    vals.reserve(samples.size());
    double maxabs = 0.0;
    for (double s : samples) {
        vals.push_back(f_(s));
        maxabs = std::max(maxabs, std::abs(vals.back()));
    }
    const double slack = 1e-9 * (1.0 + maxabs);
    for (std::size_t i = 0; i + 1 < vals.size(); ++i)
        if (vals[i + 1] < vals[i] - slack)
            throw NotIncreasing("f decreases between scale samples t = " +
                                std::to_string(samples[i]) + " and t = " +
                                std::to_string(samples[i + 1]));
}

double RealExtension::operator()(double s) const
{
    if (s <= a_)
        return f_(a_);
    if (s >= b_)
        return f_(b_);
    if (scale_.contains(s))
        return f_(scale_.snap(s));
    // s sits in a gap: use the value at the gap's left endpoint
    const auto& pieces = scale_.pieces();
    double left = a_;
    for (const ScalePiece& p : pieces) {
        const double hi = piece_hi(p);
        if (hi < s)
            left = std::max(left, hi);
        else
            break;
    }
    return f_(left);
}

double RealExtension::integrate(const QuadratureSpec& q) const
{
    q.validate();
    QuadratureSpec plain = q;
    plain.endpoint_exponent = 0.0;
    KahanSum acc;
    for (const ClosedInterval& run : scale_.continuous_runs(a_, b_))
        acc.add(integrate_adaptive(f_, run.lo, run.hi, plain));
    for (const auto& [s, mu] : scale_.scattered_points(a_, b_))
        acc.add(f_(s) * mu);
    return acc.sum;
}

RealExtension extend_to_reals(RealFn f, const TimeScale& scale, double a, double b)
{
    return RealExtension(std::move(f), scale, a, b);
}

} // namespace tsfrac
