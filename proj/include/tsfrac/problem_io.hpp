#pragma once

#include "tsfrac/solver.hpp"

#include <string>

namespace tsfrac {

struct ProblemFile {
    IVProblem problem;
    SolverConfig solver;
};

/// Build a problem from a parsed config object. Required keys: alpha,
/// horizon, f, timescale. Optional: t0 (default 0), z (default "t"),
/// solver {max_iterations, sup_norm_tol, min_nodes_per_segment},
/// quadrature {rel_tol, abs_tol, max_subdivisions}.
ProblemFile load_problem(const nlohmann::json& config);

/// Read and parse a JSON problem file. Throws ConfigError on unreadable or
/// malformed files; expression errors propagate with their positions.
ProblemFile load_problem_file(const std::string& path);

} // namespace tsfrac
