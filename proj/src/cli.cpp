#include "tsfrac/cli.hpp"

#include "tsfrac/errors.hpp"
#include "tsfrac/expr.hpp"
#include "tsfrac/fracops.hpp"
#include "tsfrac/gamma.hpp"
#include "tsfrac/oracle.hpp"
#include "tsfrac/problem_io.hpp"
#include "tsfrac/solver.hpp"
#include "tsfrac/timescale.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace tsfrac {
namespace {

std::string fmt17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

TimeScale parse_scale_arg(const std::string& arg)
{
    std::string text = arg;
    if (!arg.empty() && arg.front() != '{' && arg.front() != '[') {
        std::ifstream in(arg);
        if (!in)
            throw ConfigError("cannot read timescale descriptor: " + arg);
        text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid timescale JSON: ") + e.what());
    }
    return TimeScale::from_json(j);
}

// Results go to --out when given (with a short note on stdout), else to
// stdout directly.
void deliver(const std::string& out_path, const std::string& payload,
             std::ostream& out, const char* label)
{
    if (out_path.empty()) {
        out << payload;
        return;
    }
    std::ofstream f(out_path);
    if (!f)
        throw ConfigError("cannot write output file: " + out_path);
    f << payload;
    out << label << " written to " << out_path << "\n";
}

bool pure_point_window(const TimeScale& T, double a, double b)
{
    for (const ScalePiece& piece : T.pieces()) {
        if (piece_hi(piece) <= piece_lo(piece))
            continue;
        if (piece_lo(piece) < b - 1e-12 && piece_hi(piece) > a + 1e-12)
            return false;
    }
    return true;
}

struct OperatorArgs {
    std::string problem_path, scale_arg, z_src, f_src, out_path, format = "csv";
    double alpha = 0.5, t0 = 0.0, rel_tol = 0.0, abs_tol = 0.0;
    int max_subdiv = 0;
    std::vector<double> points;
    bool oracle = false;
};

void add_operator_options(CLI::App* sub, OperatorArgs& o)
{
    sub->add_option("--problem", o.problem_path, "problem file supplying alpha/t0/z/timescale");
    sub->add_option("--alpha", o.alpha, "order in (0,1)");
    sub->add_option("--t0", o.t0, "base point of the operator");
    sub->add_option("--z", o.z_src, "weight expression in t (default: t)");
    sub->add_option("--f", o.f_src, "integrand expression in t");
    sub->add_option("--timescale", o.scale_arg, "timescale descriptor (inline JSON or path)");
    sub->add_option("--t", o.points, "evaluation point(s)");
    sub->add_option("--out", o.out_path, "output file");
    sub->add_option("--format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--rel-tol", o.rel_tol, "quadrature relative tolerance");
    sub->add_option("--abs-tol", o.abs_tol, "quadrature absolute tolerance");
    sub->add_option("--max-subdiv", o.max_subdiv, "quadrature subdivision budget");
    sub->add_flag("--oracle", o.oracle, "cross-check against the exact finite sum (pure-point scales)");
}

int run_operator(bool derivative, const OperatorArgs& o, CLI::App* sub,
                 std::ostream& out, std::ostream& err)
{
    FracOpSpec spec;
    bool have_scale = false;
    if (!o.problem_path.empty()) {
        spec = load_problem_file(o.problem_path).problem.op_spec();
        have_scale = true;
    }
    if (sub->count("--alpha") != 0u)
        spec.alpha = o.alpha;
    if (sub->count("--t0") != 0u)
        spec.a = o.t0;
    if (sub->count("--z") != 0u)
        spec.z = ExprFn::parse(o.z_src, {"t"});
    if (sub->count("--timescale") != 0u) {
        spec.scale = parse_scale_arg(o.scale_arg);
        have_scale = true;
    }
    if (!have_scale)
        throw ConfigError("needs --timescale or --problem");
    if (sub->count("--rel-tol") != 0u)
        spec.quad.rel_tol = o.rel_tol;
    if (sub->count("--abs-tol") != 0u)
        spec.quad.abs_tol = o.abs_tol;
    if (sub->count("--max-subdiv") != 0u)
        spec.quad.max_subdivisions = o.max_subdiv;
    spec.quad.validate();

    if (o.f_src.empty())
        throw ConfigError("--f EXPR (integrand in t) is required");
    const ExprFn h = ExprFn::parse(o.f_src, {"t"});
    if (o.points.empty())
        throw ConfigError("at least one --t evaluation point is required");

    const char* name = derivative ? "fracderiv" : "fracint";
    double t_max = spec.a;
    for (double t : o.points)
        t_max = std::max(t_max, t);
    bool with_oracle = false;
    if (o.oracle) {
        if (derivative)
            err << name << ": --oracle applies to fracint only, skipping cross-check\n";
        else if (!pure_point_window(spec.scale, spec.a, t_max))
            err << name << ": --oracle needs a pure-point scale on the queried range, "
                           "skipping cross-check\n";
        else
            with_oracle = true;
    }

    nlohmann::json jrows = nlohmann::json::array();
    std::string csv = with_oracle ? "t,value,oracle,abs_diff\n" : "t,value\n";
    for (double t : o.points) {
        const RealFn hf = [&h](double s) { return h(s); };
        const double v = derivative ? gen_frac_derivative(spec, hf, t)
                                    : gen_frac_integral(spec, hf, t);
        nlohmann::json row{{"t", t}, {"value", v}};
        csv += fmt17(t) + "," + fmt17(v);
        if (with_oracle) {
            const double ref =
                oracle::discrete_frac_sum(spec.scale, spec.alpha, spec.z, h, spec.a, t);
            row["oracle"] = ref;
            row["abs_diff"] = std::abs(v - ref);
            csv += "," + fmt17(ref) + "," + fmt17(std::abs(v - ref));
        }
        csv += "\n";
        jrows.push_back(std::move(row));
    }

    if (o.format == "json") {
        nlohmann::json payload{{"command", name},
                               {"alpha", spec.alpha},
                               {"a", spec.a},
                               {"points", jrows}};
        deliver(o.out_path, payload.dump(2) + "\n", out, name);
    } else {
        deliver(o.out_path, csv, out, name);
    }
    return 0;
}

struct SolveArgs {
    std::string problem_path, scale_arg, z_src, f_src, out_path, format = "csv";
    double alpha = 0.5, t0 = 0.0, horizon = 1.0, rel_tol = 0.0, abs_tol = 0.0,
           sup_tol = 0.0;
    int max_subdiv = 0, max_iter = 0, nodes = 0;
    bool oracle = false;
};

ProblemFile assemble_problem(const SolveArgs& o, CLI::App* sub)
{
    ProblemFile pf;
    if (!o.problem_path.empty())
        pf = load_problem_file(o.problem_path);
    if (sub->count("--alpha") != 0u)
        pf.problem.alpha = o.alpha;
    if (sub->count("--t0") != 0u)
        pf.problem.t0 = o.t0;
    if (sub->count("--horizon") != 0u)
        pf.problem.horizon = o.horizon;
    if (sub->count("--z") != 0u)
        pf.problem.z = ExprFn::parse(o.z_src, {"t"});
    if (sub->count("--f") != 0u)
        pf.problem.f = ExprFn::parse(o.f_src, {"t", "y"});
    if (sub->count("--timescale") != 0u)
        pf.problem.scale = parse_scale_arg(o.scale_arg);
    if (sub->count("--rel-tol") != 0u)
        pf.problem.quad.rel_tol = o.rel_tol;
    if (sub->count("--abs-tol") != 0u)
        pf.problem.quad.abs_tol = o.abs_tol;
    if (sub->count("--max-subdiv") != 0u)
        pf.problem.quad.max_subdivisions = o.max_subdiv;
    if (sub->count("--max-iter") != 0u)
        pf.solver.max_iterations = o.max_iter;
    if (sub->count("--sup-tol") != 0u)
        pf.solver.sup_norm_tol = o.sup_tol;
    if (sub->count("--nodes") != 0u)
        pf.solver.min_nodes_per_segment = o.nodes;
    if (pf.problem.f.arity() != 2)
        throw ConfigError("needs --problem or --f to define the right-hand side");
    pf.problem.quad.validate();
    return pf;
}

void add_solve_options(CLI::App* sub, SolveArgs& o)
{
    sub->add_option("--problem", o.problem_path, "problem file (JSON)");
    sub->add_option("--alpha", o.alpha, "order in (0,1)");
    sub->add_option("--t0", o.t0, "initial time");
    sub->add_option("--horizon", o.horizon, "length of the solution window");
    sub->add_option("--z", o.z_src, "weight expression in t");
    sub->add_option("--f", o.f_src, "right-hand side expression in t, y");
    sub->add_option("--timescale", o.scale_arg, "timescale descriptor (inline JSON or path)");
    sub->add_option("--out", o.out_path, "output file");
    sub->add_option("--format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--rel-tol", o.rel_tol, "quadrature relative tolerance");
    sub->add_option("--abs-tol", o.abs_tol, "quadrature absolute tolerance");
    sub->add_option("--max-subdiv", o.max_subdiv, "quadrature subdivision budget");
    sub->add_option("--max-iter", o.max_iter, "Picard iteration cap");
    sub->add_option("--sup-tol", o.sup_tol, "sup-norm stopping tolerance");
    sub->add_option("--nodes", o.nodes, "grid nodes per continuous segment");
}

int run_solve(const SolveArgs& o, CLI::App* sub, std::ostream& out, std::ostream& err)
{
    const ProblemFile pf = assemble_problem(o, sub);
    const SolveReport rep = solve_picard(pf.problem, pf.solver);

    const std::vector<double>& t = rep.solution.nodes();
    const std::vector<double>& y = rep.solution.values();
    std::string csv = "t,y,residual\n";
    for (std::size_t i = 0; i < t.size(); ++i)
        csv += fmt17(t[i]) + "," + fmt17(y[i]) + "," + fmt17(rep.residuals[i]) + "\n";

    if (o.format == "json") {
        nlohmann::json payload{
            {"alpha", pf.problem.alpha},
            {"t0", pf.problem.t0},
            {"horizon", pf.problem.horizon},
            {"converged", rep.converged},
            {"iterations", rep.iterations},
            {"final_sup_delta", rep.final_sup_delta},
            {"residual_sup", rep.residual_sup},
            {"sup_deltas", rep.sup_deltas},
            {"contraction",
             {{"lipschitz", rep.contraction.lipschitz},
              {"max_bound", rep.contraction.max_bound},
              {"satisfied", rep.contraction.satisfied}}},
            {"t", t},
            {"y", y},
            {"residual", rep.residuals}};
        deliver(o.out_path, payload.dump(2) + "\n", out, "solve report");
    } else {
        deliver(o.out_path, csv, out, "solution");
    }

    out << "solve: " << (rep.converged ? "converged" : "NOT converged") << " after "
        << rep.iterations << " iteration(s), residual sup = " << fmt17(rep.residual_sup)
        << ", y(end) = " << fmt17(y.back()) << "\n";
    out << "contraction: estimated L = " << fmt17(rep.contraction.lipschitz)
        << ", max bound = " << fmt17(rep.contraction.max_bound)
        << (rep.contraction.satisfied ? " (< 1, satisfied)" : " (>= 1, not satisfied)")
        << "\n";

    if (o.oracle) {
        const GridFunction ref = oracle::volterra_dense_solve(pf.problem, 4096);
        const double cutoff = pf.problem.t0 + 0.04 * pf.problem.horizon;
        double sup = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i)
            if (t[i] >= cutoff)
                sup = std::max(sup, std::abs(y[i] - ref(t[i])));
        out << "oracle cross-check: sup |y - volterra| = " << fmt17(sup)
            << " over nodes t >= " << fmt17(cutoff) << "\n";
    }

    if (!rep.converged) {
        err << "solve: iteration did not reach the requested tolerance\n";
        return 1;
    }
    return 0;
}

int run_check(const SolveArgs& o, CLI::App* sub, double lipschitz_flag,
              bool lipschitz_given, std::ostream& out, std::ostream& err)
{
    (void)err;
    const ProblemFile pf = assemble_problem(o, sub);
    const double L = lipschitz_given ? lipschitz_flag : estimate_lipschitz(pf.problem);
    const ContractionReport rep = check_contraction(pf.problem, L, pf.solver);
    const auto [n_hat, plateaued] = check_boundedness(pf.problem);

    std::string csv = "t,bound\n";
    for (std::size_t i = 0; i < rep.nodes.size(); ++i)
        csv += fmt17(rep.nodes[i]) + "," + fmt17(rep.bound[i]) + "\n";

    if (o.format == "json") {
        nlohmann::json payload{{"lipschitz", rep.lipschitz},
                               {"lipschitz_source", lipschitz_given ? "given" : "estimated"},
                               {"max_bound", rep.max_bound},
                               {"satisfied", rep.satisfied},
                               {"bounded_rhs_estimate", n_hat},
                               {"bounded_rhs_plateau", plateaued},
                               {"nodes", rep.nodes},
                               {"bound", rep.bound}};
        deliver(o.out_path, payload.dump(2) + "\n", out, "contraction report");
    } else {
        deliver(o.out_path, csv, out, "contraction bounds");
    }

    out << "check: L = " << fmt17(L) << (lipschitz_given ? " (given)" : " (estimated)")
        << ", max contraction bound = " << fmt17(rep.max_bound)
        << (rep.satisfied ? " < 1: Picard contracts on this grid\n"
                          : " >= 1: contraction not guaranteed\n");
    out << "boundedness probe: sup |f| ~ " << fmt17(n_hat)
        << (plateaued ? " (stable when the probe range doubles)\n"
                      : " (keeps growing with the probe range)\n");
    return 0;
}

int run_example4(double lipschitz, double f_const, const std::string& out_path,
                 const std::string& format, std::ostream& out)
{
    IVProblem p;
    p.alpha = 0.5;
    p.t0 = 0.0;
    p.horizon = 2.0;
    p.z = ExprFn::parse("t^2", {"t"});
    p.f = ExprFn::parse(fmt17(f_const), {"t", "y"});
    p.scale = TimeScale::geometric_grid(2.0, true, 0.0, 4.0);

    const std::vector<double> sample_t{0.25, 0.5, 1.0, 2.0};
    const double sqrt_pi = std::sqrt(std::numbers::pi_v<double>);
    const double inv_g_half = reciprocal_gamma(0.5);

    out << "powers-of-two scale, z(t) = t^2, alpha = 1/2\n\n";
    out << "M_alpha(t) against the closed value 3:\n";
    out << "      t     computed            |error|\n";
    nlohmann::json jm = nlohmann::json::array();
    for (double t : sample_t) {
        const double m = m_alpha(p, t);
        out << "  " << fmt17(t) << "  " << fmt17(m) << "  " << fmt17(std::abs(m - 3.0))
            << "\n";
        jm.push_back({{"t", t}, {"m_alpha", m}, {"reference", 3.0}});
    }

    out << "\ncontraction bound with L = " << fmt17(lipschitz)
        << " against 9 t^2 L / sqrt(pi):\n";
    out << "      t     computed            reference           satisfied\n";
    nlohmann::json jb = nlohmann::json::array();
    for (double t : sample_t) {
        const double zeta = weight_derivative_extension(p, t);
        const double b = lipschitz * zeta * m_alpha(p, t) * (t - p.t0) * inv_g_half;
        const double ref = 9.0 * t * t * lipschitz / sqrt_pi;
        out << "  " << fmt17(t) << "  " << fmt17(b) << "  " << fmt17(ref) << "  "
            << (b < 1.0 ? "yes" : "no") << "\n";
        jb.push_back({{"t", t}, {"bound", b}, {"reference", ref}, {"satisfied", b < 1.0}});
    }

    const SolveReport rep = solve_picard(p);
    out << "\ndemo solve with f(t,y) = " << fmt17(f_const) << " on [0, 2]:\n";
    out << "      t     y\n";
    std::string csv = "t,y,residual\n";
    nlohmann::json jy = nlohmann::json::array();
    const std::vector<double>& t = rep.solution.nodes();
    const std::vector<double>& y = rep.solution.values();
    for (std::size_t i = 0; i < t.size(); ++i) {
        out << "  " << fmt17(t[i]) << "  " << fmt17(y[i]) << "\n";
        csv += fmt17(t[i]) + "," + fmt17(y[i]) + "," + fmt17(rep.residuals[i]) + "\n";
        jy.push_back({{"t", t[i]}, {"y", y[i]}, {"residual", rep.residuals[i]}});
    }
    out << "solve " << (rep.converged ? "converged" : "NOT converged") << " in "
        << rep.iterations << " iteration(s)\n";

    if (!out_path.empty()) {
        if (format == "json") {
            nlohmann::json payload{{"m_alpha", jm},
                                   {"bound", jb},
                                   {"lipschitz", lipschitz},
                                   {"solve", jy},
                                   {"converged", rep.converged}};
            deliver(out_path, payload.dump(2) + "\n", out, "example report");
        } else {
            deliver(out_path, csv, out, "demo solution");
        }
    }
    return rep.converged ? 0 : 1;
}

int run_ts_info(const std::string& scale_arg, const std::vector<double>& points,
                std::ostream& out)
{
    const TimeScale T = parse_scale_arg(scale_arg);
    nlohmann::json payload{{"descriptor", T.describe()},
                           {"min", T.min()},
                           {"max", T.max()}};
    const auto scattered = T.scattered_points(T.min(), T.max());
    payload["scattered_count"] = scattered.size();
    nlohmann::json jruns = nlohmann::json::array();
    for (const ClosedInterval& run : T.continuous_runs(T.min(), T.max()))
        jruns.push_back({{"lo", run.lo}, {"hi", run.hi}});
    payload["continuous_runs"] = jruns;

    nlohmann::json jpts = nlohmann::json::array();
    for (double x : points) {
        nlohmann::json row{{"t", x}, {"member", T.contains(x)}};
        if (T.contains(x)) {
            const double v = T.snap(x);
            const PointClass c = T.classify(v);
            row["sigma"] = T.sigma(v);
            row["rho"] = T.rho(v);
            row["mu"] = T.graininess(v);
            row["right_scattered"] = c.right_scattered;
            row["left_scattered"] = c.left_scattered;
            row["isolated"] = c.isolated();
            row["dense"] = c.dense();
        }
        jpts.push_back(std::move(row));
    }
    if (!points.empty())
        payload["points"] = jpts;
    out << payload.dump(2) << "\n";
    return 0;
}

} // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"fractional integrals, derivatives, and initial value problems on time scales"};
    app.require_subcommand(1);

    OperatorArgs int_args, deriv_args;
    CLI::App* fracint = app.add_subcommand(
        "fracint", "evaluate the fractional integral of --f at the given points");
    add_operator_options(fracint, int_args);
    CLI::App* fracderiv = app.add_subcommand(
        "fracderiv", "evaluate the fractional derivative of --f at the given points");
    add_operator_options(fracderiv, deriv_args);

    SolveArgs solve_args, check_args;
    CLI::App* solve = app.add_subcommand("solve", "solve the initial value problem by Picard iteration");
    add_solve_options(solve, solve_args);
    solve->add_flag("--oracle", solve_args.oracle,
                    "cross-check against a dense-grid Volterra solve (real intervals)");

    CLI::App* check = app.add_subcommand(
        "check", "report the contraction bound and a boundedness probe for a problem");
    add_solve_options(check, check_args);
    double lipschitz_flag = 0.0;
    check->add_option("--lipschitz", lipschitz_flag,
                      "Lipschitz constant of f in y (estimated when omitted)");

    double ex4_lipschitz = 0.1, ex4_f_const = 1.0;
    std::string ex4_out, ex4_format = "csv";
    CLI::App* example4 = app.add_subcommand(
        "reproduce-example4",
        "reproduce the worked example on the powers-of-two scale with z(t) = t^2");
    example4->add_option("--lipschitz", ex4_lipschitz, "L for the contraction bound table");
    example4->add_option("--f-const", ex4_f_const, "constant right-hand side of the demo solve");
    example4->add_option("--out", ex4_out, "output file for the demo solution");
    example4->add_option("--format", ex4_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    std::string info_scale;
    std::vector<double> info_points;
    CLI::App* ts_info = app.add_subcommand("ts-info", "describe a timescale descriptor");
    ts_info->add_option("--timescale", info_scale, "descriptor (inline JSON or path)")
        ->required();
    ts_info->add_option("--t", info_points, "points to classify");

    int code = 0;
    fracint->callback([&] { code = run_operator(false, int_args, fracint, out, err); });
    fracderiv->callback([&] { code = run_operator(true, deriv_args, fracderiv, out, err); });
    solve->callback([&] { code = run_solve(solve_args, solve, out, err); });
    check->callback([&] {
        code = run_check(check_args, check, lipschitz_flag,
                         check->count("--lipschitz") != 0u, out, err);
    });
    example4->callback(
        [&] { code = run_example4(ex4_lipschitz, ex4_f_const, ex4_out, ex4_format, out); });
    ts_info->callback([&] { code = run_ts_info(info_scale, info_points, out); });

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
        return code;
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const SyntaxError& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const UnknownIdentifier& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const ArityMismatch& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const UndeclaredVariable& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const EmptyTimeScale& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace tsfrac
