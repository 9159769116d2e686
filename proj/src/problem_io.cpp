#include "tsfrac/problem_io.hpp"
#include "tsfrac/errors.hpp"

#include <fstream>

namespace tsfrac {
namespace {

double require_number(const nlohmann::json& j, const char* key)
{
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError(std::string("problem file needs a numeric \"") + key + "\"");
    return j[key].get<double>();
}

double number_or(const nlohmann::json& j, const char* key, double fallback)
{
    if (!j.contains(key))
        return fallback;
    if (!j[key].is_number())
        throw ConfigError(std::string("\"") + key + "\" must be a number");
    return j[key].get<double>();
}

int integer_or(const nlohmann::json& j, const char* key, int fallback)
{
    if (!j.contains(key))
        return fallback;
    if (!j[key].is_number_integer())
        throw ConfigError(std::string("\"") + key + "\" must be an integer");
    return j[key].get<int>();
}

std::string require_string(const nlohmann::json& j, const char* key)
{
    if (!j.contains(key) || !j[key].is_string())
        throw ConfigError(std::string("problem file needs a string \"") + key + "\"");
    return j[key].get<std::string>();
}

} // namespace

ProblemFile load_problem(const nlohmann::json& config)
{
    if (!config.is_object())
        throw ConfigError("problem file must be a JSON object");
    ProblemFile pf;
    pf.problem.alpha = require_number(config, "alpha");
    pf.problem.t0 = number_or(config, "t0", 0.0);
    pf.problem.horizon = require_number(config, "horizon");

    if (config.contains("z"))
        pf.problem.z = ExprFn::parse(require_string(config, "z"), {"t"});
    pf.problem.f = ExprFn::parse(require_string(config, "f"), {"t", "y"});

    if (!config.contains("timescale"))
        throw ConfigError("problem file needs a \"timescale\" descriptor");
    pf.problem.scale = TimeScale::from_json(config["timescale"]);

    if (config.contains("quadrature")) {
        const nlohmann::json& q = config["quadrature"];
        if (!q.is_object())
            throw ConfigError("\"quadrature\" must be an object");
        pf.problem.quad.rel_tol = number_or(q, "rel_tol", pf.problem.quad.rel_tol);
        pf.problem.quad.abs_tol = number_or(q, "abs_tol", pf.problem.quad.abs_tol);
        pf.problem.quad.max_subdivisions =
            integer_or(q, "max_subdivisions", pf.problem.quad.max_subdivisions);
        pf.problem.quad.validate();
    }

    if (config.contains("solver")) {
        const nlohmann::json& s = config["solver"];
        if (!s.is_object())
            throw ConfigError("\"solver\" must be an object");
        pf.solver.max_iterations = integer_or(s, "max_iterations", pf.solver.max_iterations);
        pf.solver.sup_norm_tol = number_or(s, "sup_norm_tol", pf.solver.sup_norm_tol);
        pf.solver.min_nodes_per_segment =
            integer_or(s, "min_nodes_per_segment", pf.solver.min_nodes_per_segment);
        if (pf.solver.max_iterations < 1 || !(pf.solver.sup_norm_tol > 0.0) ||
            pf.solver.min_nodes_per_segment < 2)
            throw ConfigError("\"solver\" settings out of range");
    }
    return pf;
}

ProblemFile load_problem_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open problem file: " + path);
    nlohmann::json config;
    try {
        in >> config;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid JSON in " + path + ": " + e.what());
    }
    return load_problem(config);
}

} // namespace tsfrac
