#include "tsfrac/solver.hpp"
#include "tsfrac/calculus.hpp"
#include "tsfrac/errors.hpp"
#include "tsfrac/gamma.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
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

// Ordinary derivative of a smooth expression at a real point: central
// quotients with step halving and ratio-4 elimination.
double real_derivative(const ExprFn& g, double s)
{
    const double h0 = 1e-3 * (1.0 + std::abs(s));
    constexpr int kLevels = 7;
    std::array<double, kLevels> prev{};
    double best = 0.0;
    double best_gap = std::numeric_limits<double>::infinity();
    double diag_prev = 0.0;
    double h = h0;
    for (int k = 0; k < kLevels; ++k, h *= 0.5) {
        std::array<double, kLevels> row{};
        row[0] = (g(s + h) - g(s - h)) / (2.0 * h);
        double weight = 1.0;
        for (int j = 1; j <= k; ++j) {
            weight *= 4.0;
            row[j] = row[j - 1] + (row[j - 1] - prev[j - 1]) / (weight - 1.0);
        }
        const double diag = row[k];
        if (k >= 1) {
            const double gap = std::abs(diag - diag_prev);
            if (gap < best_gap) {
                best_gap = gap;
                best = diag;
            }
            if (gap <= 1e-10 * (std::abs(diag) + 1.0))
                return diag;
        }
        diag_prev = diag;
        prev = row;
    }
    return best;
}

const RealFn make_weight_fn(const IVProblem& p)
{
    return [&p](double s) { return p.z(s); };
}

} // namespace

double weight_derivative_extension(const IVProblem& p, double s)
{
    const TimeScale& T = p.scale;
    switch (T.generator()) {
    case TimeScale::Generator::geometric: {
        const double q = T.generator_param();
        if (std::abs(s) > 1e-300)
            return (p.z(q * s) - p.z(s)) / ((q - 1.0) * s);
        return real_derivative(p.z, s);
    }
    case TimeScale::Generator::uniform: {
        const double h = T.generator_param();
        return (p.z(s + h) - p.z(s)) / h;
    }
    case TimeScale::Generator::real_interval:
        return real_derivative(p.z, s);
    case TimeScale::Generator::none:
        break;
    }
    if (T.contains(s)) {
        const double v = T.snap(s);
        const double sig = T.sigma(v);
        if (sig > v)
            return (p.z(sig) - p.z(v)) / (sig - v);
        return real_derivative(p.z, v);
    }
    // s in a gap (left, sigma(left)): the step extension takes the left value
    double left = T.min();
    double right = T.max();
    for (const ScalePiece& piece : T.pieces()) {
        if (piece_hi(piece) < s)
            left = piece_hi(piece);
        else {
            right = piece_lo(piece);
            break;
        }
    }
    return (p.z(right) - p.z(left)) / (right - left);
}

namespace {

// z^Delta at a solution node. A window-truncated generator scale (uniform,
// geometric) keeps jumping past its materialized maximum, so the quotient
// follows the generator there; an explicitly bounded scale has no delta
// derivative at a left-scattered maximum and NotInKappa propagates.
double node_weight_delta(const IVProblem& p, double t)
{
    const double v = p.scale.snap(t);
    const PointClass c = p.scale.classify(v);
    if (c.is_max && c.left_scattered && p.scale.generator() != TimeScale::Generator::none)
        return weight_derivative_extension(p, v);
    return delta_derivative(make_weight_fn(p), p.scale, v);
}

// Precomputed sweep structure shared by picard_operator and solve_picard.
struct SweepPlan {
    const IVProblem* problem = nullptr;
    std::vector<double> nodes;
    std::vector<double> z_node;
    std::vector<double> zd_node;

    struct Jump {
        double s, mu, zs, zsig;
        std::size_t node_index;
    };
    std::vector<Jump> jumps;
    std::vector<std::size_t> jumps_before; // per node, #jumps strictly left of it
    std::vector<double> kernel;            // [i * jumps.size() + j]

    struct RunSpan {
        std::size_t first, last; // node index range covering the run
    };
    std::vector<RunSpan> runs;
    double inv_gamma_alpha = 0.0;
};

std::size_t node_index_of(const std::vector<double>& nodes, double x)
{
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), x - 1e-11);
    if (it == nodes.end() || std::abs(*it - x) > 1e-10 * (1.0 + std::abs(x)))
        throw Error("solver", "grid node lookup failed at t = " + std::to_string(x));
    return static_cast<std::size_t>(it - nodes.begin());
}

SweepPlan make_plan(const IVProblem& p, std::vector<double> nodes)
{
    SweepPlan plan;
    plan.problem = &p;
    plan.nodes = std::move(nodes);
    const std::size_t n = plan.nodes.size();
    if (n < 1)
        throw Error("solver", "empty solver grid");
    const double t0 = plan.nodes.front();
    const double tend = plan.nodes.back();

    plan.z_node.resize(n);
    plan.zd_node.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        plan.z_node[i] = p.z(plan.nodes[i]);
        plan.zd_node[i] = node_weight_delta(p, plan.nodes[i]);
    }

    for (const auto& [s, mu] : p.scale.scattered_points(t0, tend))
        plan.jumps.push_back({s, mu, p.z(s), p.z(s + mu), node_index_of(plan.nodes, s)});

    plan.jumps_before.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t cnt = 0;
        while (cnt < plan.jumps.size() && plan.jumps[cnt].s < plan.nodes[i] - 1e-12)
            ++cnt;
        plan.jumps_before[i] = cnt;
    }

    const double gamma = p.alpha - 1.0;
    plan.kernel.assign(n * plan.jumps.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < plan.jumps_before[i]; ++j) {
            const SweepPlan::Jump& jp = plan.jumps[j];
            const double base = plan.z_node[i] - jp.zs;
            if (!(base > 0.0))
                throw NonMonotoneWeight("z(t) - z(s) not positive between grid nodes");
            plan.kernel[i * plan.jumps.size() + j] =
                std::pow(base, gamma) * (jp.zsig - jp.zs);
        }

    for (const ClosedInterval& run : p.scale.continuous_runs(t0, tend))
        plan.runs.push_back({node_index_of(plan.nodes, run.lo),
                             node_index_of(plan.nodes, run.hi)});

    plan.inv_gamma_alpha = reciprocal_gamma(p.alpha);
    return plan;
}

std::vector<double> sweep(const SweepPlan& plan, const std::vector<double>& yv)
{
    const IVProblem& p = *plan.problem;
    const double gamma = p.alpha - 1.0;
    const std::size_t n = plan.nodes.size();
    const std::size_t nj = plan.jumps.size();
    const RealFn zf = make_weight_fn(p);

    std::vector<double> fj(nj);
    for (std::size_t j = 0; j < nj; ++j) {
        fj[j] = p.f(plan.jumps[j].s, yv[plan.jumps[j].node_index]);
        if (!std::isfinite(fj[j]))
            throw NonFiniteValue("f(t, y) is not finite at t = " +
                                 std::to_string(plan.jumps[j].s));
    }

    std::vector<double> out(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        KahanSum acc;
        for (std::size_t j = 0; j < plan.jumps_before[i]; ++j)
            acc.add(plan.kernel[i * nj + j] * fj[j]);

        for (const SweepPlan::RunSpan& run : plan.runs) {
            if (run.first >= i)
                break;
            const std::size_t top = std::min(run.last, i);
            for (std::size_t k = run.first; k < top; ++k) {
                const double x0 = plan.nodes[k], x1 = plan.nodes[k + 1];
                const double y0 = yv[k], y1 = yv[k + 1];
                const double slope = (y1 - y0) / (x1 - x0);
                const RealFn h = [&](double s) {
                    return p.f(s, y0 + slope * (s - x0));
                };
                acc.add(integrate_kernel_weighted(h, zf, plan.z_node[i], gamma, x0, x1,
                                                  p.quad));
            }
        }
        out[i] = plan.zd_node[i] * acc.sum * plan.inv_gamma_alpha;
        if (!std::isfinite(out[i]))
            throw NonFiniteValue("Picard operator produced a non-finite value at t = " +
                                 std::to_string(plan.nodes[i]));
    }
    return out;
}

ContractionReport contraction_on_nodes(const IVProblem& p, double lipschitz,
                                       const std::vector<double>& nodes)
{
    if (!(lipschitz >= 0.0))
        throw Error("solver", "Lipschitz constant must be non-negative");
    ContractionReport r;
    r.lipschitz = lipschitz;
    r.nodes = nodes;
    r.bound.reserve(nodes.size());
    const double t0 = nodes.empty() ? p.t0 : nodes.front();
    const double inv_g = reciprocal_gamma(p.alpha);
    for (double t : nodes) {
        if (t <= t0) {
            r.bound.push_back(0.0);
            continue;
        }
        const double zd = node_weight_delta(p, t);
        r.bound.push_back(lipschitz * zd * m_alpha(p, t) * (t - t0) * inv_g);
    }
    r.max_bound = 0.0;
    for (double b : r.bound)
        r.max_bound = std::max(r.max_bound, b);
    r.satisfied = r.max_bound < 1.0;
    return r;
}

} // namespace

void IVProblem::validate() const
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error("solver", "order alpha must lie in (0, 1), got " + std::to_string(alpha));
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw Error("solver", "horizon must be positive and finite");
    if (f.arity() != 2)
        throw Error("solver", "right-hand side f must be a function of (t, y)");
    op_spec().validate(t0 + horizon); // alpha, membership, weight monotonicity
}

FracOpSpec IVProblem::op_spec() const
{
    FracOpSpec spec;
    spec.alpha = alpha;
    spec.a = scale.snap(t0);
    spec.z = z;
    spec.scale = scale;
    spec.quad = quad;
    return spec;
}

std::vector<double> build_grid(const IVProblem& p, const SolverConfig& cfg)
{
    p.validate();
    const double t0 = p.scale.snap(p.t0);
    const double tend = p.scale.snap(p.t0 + p.horizon);
    const int n = std::max(cfg.min_nodes_per_segment, 2);

    std::vector<double> nodes{t0, tend};
    for (const auto& [s, mu] : p.scale.scattered_points(t0, tend))
        nodes.push_back(s);
    const double grade = 1.0 + 1.0 / p.alpha;
    for (const ClosedInterval& run : p.scale.continuous_runs(t0, tend)) {
        nodes.push_back(run.lo);
        nodes.push_back(run.hi);
        const bool graded = run.lo == t0;
        for (int j = 1; j < n; ++j) {
            const double u = static_cast<double>(j) / n;
            const double frac = graded ? std::pow(u, grade) : u;
            nodes.push_back(run.lo + (run.hi - run.lo) * frac);
        }
    }
    std::sort(nodes.begin(), nodes.end());
    std::vector<double> out;
    out.reserve(nodes.size());
    for (double x : nodes)
        if (out.empty() || x - out.back() > TimeScale::kMembershipTol)
            out.push_back(x);
    return out;
}

GridFunction picard_operator(const IVProblem& p, const GridFunction& y)
{
    p.validate();
    const std::vector<double>& nodes = y.nodes();
    if (std::abs(nodes.front() - p.scale.snap(p.t0)) > 1e-10)
        throw Error("solver", "grid must start at t0");
    SweepPlan plan = make_plan(p, nodes);
    return GridFunction(nodes, sweep(plan, y.values()));
}

double m_alpha(const IVProblem& p, double t)
{
    if (!(p.alpha > 0.0 && p.alpha < 1.0))
        throw Error("solver", "order alpha must lie in (0, 1)");
    const double t0 = p.scale.snap(p.t0);
    if (!(t > t0) || t > p.t0 + p.horizon + 1e-9)
        throw Error("solver", "m_alpha needs t in (t0, t0 + horizon], got t = " +
                                  std::to_string(t));
    const double zt = p.z(t);
    const RealFn full = [&](double s) {
        return std::pow(zt - p.z(s), p.alpha - 1.0) * weight_derivative_extension(p, s);
    };

    // Integrand pieces: the step extension of z^Delta jumps at piece
    // boundaries of explicitly listed scales; generator-backed scales extend
    // smoothly and need no interior splits.
    std::vector<double> cuts{t0, t};
    if (p.scale.generator() == TimeScale::Generator::none) {
        for (const ScalePiece& piece : p.scale.pieces())
            for (double c : {piece_lo(piece), piece_hi(piece)})
                if (c > t0 + 1e-14 && c < t - 1e-14)
                    cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    KahanSum acc;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        if (hi == t) {
            QuadratureSpec weighted = p.quad;
            weighted.endpoint_exponent = p.alpha - 1.0;
            acc.add(integrate_endpoint_weighted(full, lo, hi, weighted));
        } else {
            QuadratureSpec plain = p.quad;
            plain.endpoint_exponent = 0.0;
            acc.add(integrate_adaptive(full, lo, hi, plain));
        }
    }
    return acc.sum / (t - t0);
}

ContractionReport check_contraction(const IVProblem& p, double lipschitz,
                                    const SolverConfig& cfg)
{
    return contraction_on_nodes(p, lipschitz, build_grid(p, cfg));
}

std::pair<double, bool> check_boundedness(const IVProblem& p, const ProbeSpec& probe)
{
    if (probe.samples < 1 || !(probe.y_range > 0.0))
        throw Error("solver", "boundedness probe needs samples >= 1 and y_range > 0");
    const double t0 = p.t0, tend = p.t0 + p.horizon;
    const auto sup_over = [&](double range) {
        std::mt19937_64 rng(probe.seed);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        double m = 0.0;
        for (int k = 0; k < probe.samples; ++k) {
            const double t = t0 + (tend - t0) * u01(rng);
            const double y = (2.0 * u01(rng) - 1.0) * range;
            const double v = p.f(t, y);
            if (!std::isfinite(v))
                throw NonFiniteValue("f(t, y) is not finite at probe (t, y) = (" +
                                     std::to_string(t) + ", " + std::to_string(y) + ")");
            m = std::max(m, std::abs(v));
        }
        return m;
    };
    const double full = sup_over(probe.y_range);
    const double half = sup_over(probe.y_range * 0.5);
    const bool plateaued = full <= half * 1.05 + 1e-12;
    return {full, plateaued};
}

double estimate_lipschitz(const IVProblem& p, const ProbeSpec& probe)
{
    if (probe.samples < 1 || !(probe.y_range > 0.0))
        throw Error("solver", "Lipschitz probe needs samples >= 1 and y_range > 0");
    std::mt19937_64 rng(probe.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double t0 = p.t0, tend = p.t0 + p.horizon;
    const double Y = probe.y_range;
    double lip = 0.0;
    const auto quotient = [&](double t, double y1, double y2) {
        if (std::abs(y2 - y1) < 1e-14 * Y)
            return;
        const double f1 = p.f(t, y1), f2 = p.f(t, y2);
        if (!std::isfinite(f1) || !std::isfinite(f2))
            throw NonFiniteValue("f(t, y) is not finite during Lipschitz probing");
        lip = std::max(lip, std::abs(f2 - f1) / std::abs(y2 - y1));
    };
    // deterministic near-zero probes: many right-hand sides peak there
    for (double t : {t0, 0.5 * (t0 + tend), tend})
        quotient(t, 0.0, 1e-7 * Y);
    for (int k = 0; k < probe.samples; ++k) {
        const double t = t0 + (tend - t0) * u01(rng);
        const double y1 = (2.0 * u01(rng) - 1.0) * Y;
        const double y2 = (k % 2 == 0) ? y1 + (0.5 + u01(rng)) * 1e-6 * Y
                                       : (2.0 * u01(rng) - 1.0) * Y;
        quotient(t, y1, y2);
    }
    return lip;
}

SolveReport solve_picard(const IVProblem& p, const SolverConfig& cfg)
{
    if (cfg.max_iterations < 1 || !(cfg.sup_norm_tol > 0.0))
        throw Error("solver", "solver config needs max_iterations >= 1 and sup_norm_tol > 0");
    std::vector<double> nodes = build_grid(p, cfg);
    SweepPlan plan = make_plan(p, nodes);

    std::vector<double> y(nodes.size(), 0.0);
    std::vector<double> sup_deltas;
    bool converged = false;
    int iterations = 0;
    for (int k = 1; k <= cfg.max_iterations; ++k) {
        std::vector<double> next = sweep(plan, y);
        double delta = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i)
            delta = std::max(delta, std::abs(next[i] - y[i]));
        y = std::move(next);
        sup_deltas.push_back(delta);
        iterations = k;
        if (delta <= cfg.sup_norm_tol) {
            converged = true;
            break;
        }
    }

    const std::vector<double> fy = sweep(plan, y);
    std::vector<double> residuals(y.size());
    double residual_sup = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        residuals[i] = std::abs(y[i] - fy[i]);
        residual_sup = std::max(residual_sup, residuals[i]);
    }

    double ymax = 0.0;
    for (double v : y)
        ymax = std::max(ymax, std::abs(v));
    ProbeSpec probe;
    probe.y_range = std::max(1.0, 2.0 * ymax);
    const double lip = estimate_lipschitz(p, probe);

    return SolveReport{
        .solution = GridFunction(nodes, y),
        .iterations = iterations,
        .final_sup_delta = sup_deltas.empty() ? 0.0 : sup_deltas.back(),
        .residual_sup = residual_sup,
        .residuals = std::move(residuals),
        .sup_deltas = std::move(sup_deltas),
        .contraction = contraction_on_nodes(p, lip, nodes),
        .converged = converged,
    };
}

double verify_solution(const IVProblem& p, const GridFunction& y)
{
    p.validate();
    const double t0 = p.scale.snap(p.t0);
    const RealFn h = [&](double s) { return p.f(s, y(s)); };
    const double inv_g = reciprocal_gamma(p.alpha);
    double sup = 0.0;
    for (std::size_t i = 0; i < y.nodes().size(); ++i) {
        const double t = y.nodes()[i];
        double F = 0.0;
        if (t > t0)
            F = node_weight_delta(p, t) *
                weighted_kernel_integral(p.z, p.scale, p.quad, t0, t, p.alpha - 1.0, h) *
                inv_g;
        sup = std::max(sup, std::abs(y.values()[i] - F));
    }
    return sup;
}

std::pair<double, double> roundtrip_check(const IVProblem& p, const RealFn& y, double t)
{
    p.validate();
    const double vt = p.scale.snap(t);
    FracOpSpec spec = p.op_spec();
    // The outer integral sees Richardson-level noise from the inner
    // derivative, so its tolerances are floored well above that noise.
    spec.quad.rel_tol = std::max(spec.quad.rel_tol, 1e-6);
    spec.quad.abs_tol = std::max(spec.quad.abs_tol, 1e-8);

    const RealFn dy = [&](double s) { return gen_frac_derivative(spec, y, s); };
    const RealFn zf = make_weight_fn(p);
    const double lhs = delta_derivative(zf, p.scale, vt) * gen_frac_integral(spec, dy, vt);
    return {lhs, y(vt)};
}

} // namespace tsfrac
