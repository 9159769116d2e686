#include "tsfrac/oracle.hpp"
#include "tsfrac/errors.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace tsfrac::oracle {
namespace {

// Local ordinary derivative, on purpose not shared with the main modules:
// fourth-order central difference with a fixed step.
double local_derivative(const ExprFn& g, double s)
{
    const double h = 1e-5 * (1.0 + std::abs(s));
    return (-g(s + 2 * h) + 8 * g(s + h) - 8 * g(s - h) + g(s - 2 * h)) / (12 * h);
}

} // namespace

double rl_power_rule(double alpha, double nu, double t)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("order outside (0, 1)", "rl_power_rule");
    if (!(nu > -1.0))
        throw DomainError("exponent nu must exceed -1", "rl_power_rule");
    if (t < 0.0)
        throw DomainError("negative evaluation point", "rl_power_rule");
    if (t == 0.0) {
        if (nu + alpha > 0.0)
            return 0.0;
        throw DomainError("t^(nu+alpha) unbounded at 0", "rl_power_rule");
    }
    return std::tgamma(nu + 1.0) / std::tgamma(nu + 1.0 + alpha) * std::pow(t, nu + alpha);
}

double discrete_frac_sum(const TimeScale& scale, double alpha, const ExprFn& z,
                         const ExprFn& h, double a, double t)
{
    // (0, 1] rather than (0, 1): order 1 is the plain delta integral and is
    // needed as the reference side of semigroup checks.
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw DomainError("order outside (0, 1]", "discrete_frac_sum");
    const double va = scale.snap(a);
    const double vt = scale.snap(t);
    for (const ScalePiece& piece : scale.pieces()) {
        if (piece_hi(piece) <= piece_lo(piece))
            continue;
        if (piece_lo(piece) < vt - 1e-12 && piece_hi(piece) > va + 1e-12)
            throw ScaleHasContinuousPart(
                "discrete_frac_sum needs a pure-point scale on [a, t]");
    }
    if (vt <= va)
        return 0.0;
    const double zt = z(vt);
    long double acc = 0.0L;
    for (const auto& [s, mu] : scale.scattered_points(va, vt)) {
        const long double base = static_cast<long double>(zt) - z(s);
        acc += std::pow(base, static_cast<long double>(alpha) - 1.0L) *
               (static_cast<long double>(z(s + mu)) - z(s)) *
               static_cast<long double>(h(s));
    }
    return static_cast<double>(acc) / std::tgamma(alpha);
}

GridFunction volterra_dense_solve(const IVProblem& p, int grid_n)
{
    if (grid_n < 64)
        throw Error("oracle", "volterra grid needs at least 64 nodes");
    const double t0 = p.t0;
    const double tend = p.t0 + p.horizon;
    bool covered = false;
    for (const ClosedInterval& run : p.scale.continuous_runs(t0, tend))
        if (run.lo <= t0 + 1e-12 && run.hi >= tend - 1e-12)
            covered = true;
    if (!covered)
        throw Error("oracle",
                    "volterra oracle needs [t0, t0+horizon] inside one real interval");

    const int n = grid_n;
    const double step = (tend - t0) / (n - 1);
    std::vector<double> nodes(n), Z(n), zd(n), y(n, 0.0), phi(n, 0.0);
    for (int i = 0; i < n; ++i) {
        nodes[i] = t0 + step * i;
        Z[i] = p.z(nodes[i]);
        zd[i] = local_derivative(p.z, nodes[i]);
        if (i > 0 && !(Z[i] > Z[i - 1]))
            throw NonMonotoneWeight("weight must increase along the oracle grid");
    }

    const double inv_gamma = 1.0 / std::tgamma(p.alpha);
    const double al = p.alpha;
    phi[0] = p.f(nodes[0], 0.0);

    for (int i = 1; i < n; ++i) {
        const long double Vi = Z[i];
        // contributions of cells [Z_j, Z_{j+1}] with both ends known
        long double known = 0.0L;
        for (int j = 0; j + 1 < i; ++j) {
            const long double A = Vi - Z[j];
            const long double B = Vi - Z[j + 1];
            const long double Aa = std::pow(A, (long double)al);
            const long double Ba = std::pow(B, (long double)al);
            const long double m0 = (Aa - Ba) / al;
            const long double m1 =
                A * (Aa - Ba) / al - (Aa * A - Ba * B) / (al + 1.0L);
            const long double slope = (phi[j + 1] - (long double)phi[j]) / (Z[j + 1] - Z[j]);
            known += phi[j] * m0 + slope * m1;
        }
        // last cell [Z_{i-1}, Z_i]: phi_i enters implicitly
        const long double dZ = Vi - Z[i - 1];
        const long double dZa = std::pow(dZ, (long double)al);
        const long double m0_last = dZa / al;
        const long double w_self = dZa / (al * (al + 1.0L));
        known += phi[i - 1] * (m0_last - w_self);

        const double c = zd[i] * inv_gamma;
        double yi = y[i - 1];
        for (int it = 0; it < 200; ++it) {
            const double f_here = p.f(nodes[i], yi);
            const double next =
                c * static_cast<double>(known + w_self * (long double)f_here);
            if (!std::isfinite(next))
                throw NonFiniteValue("volterra oracle produced a non-finite iterate at t = " +
                                     std::to_string(nodes[i]));
            const double change = std::abs(next - yi);
            yi = next;
            if (change <= 1e-15 * (1.0 + std::abs(yi)))
                break;
        }
        y[i] = yi;
        phi[i] = p.f(nodes[i], yi);
    }
    return GridFunction(nodes, y);
}

} // namespace tsfrac::oracle
