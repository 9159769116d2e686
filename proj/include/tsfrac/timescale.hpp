#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

// Time scales: nonempty closed subsets of R represented as a sorted list of
// disjoint pieces (closed intervals of positive length and isolated points).
// All membership queries use an absolute snapping tolerance of 1e-12.

namespace tsfrac {

struct ClosedInterval {
    double lo;
    double hi;
};

struct IsolatedPoint {
    double x;
};

using ScalePiece = std::variant<ClosedInterval, IsolatedPoint>;

double piece_lo(const ScalePiece& p);
double piece_hi(const ScalePiece& p);

/// Left/right density classification of a point of the scale.
struct PointClass {
    bool right_scattered = false; // sigma(t) > t
    bool right_dense = false;     // sigma(t) == t and t < max
    bool left_scattered = false;  // rho(t) < t
    bool left_dense = false;      // rho(t) == t and t > min
    bool is_min = false;
    bool is_max = false;

    bool isolated() const { return right_scattered && left_scattered; }
    bool dense() const { return right_dense && left_dense; }
};

class TimeScale {
public:
    static constexpr double kMembershipTol = 1e-12;

    /// How the scale was generated. Used to extend the jump operator off the
    /// scale when a closed-form generator is known (see solver::m_alpha).
    enum class Generator { none, real_interval, uniform, geometric };

    /// Sorts, merges overlapping/touching pieces, demotes degenerate
    /// intervals to points, and drops duplicates. Throws EmptyTimeScale.
    static TimeScale canonicalize(std::vector<ScalePiece> raw);

    /// [lo, hi] as a single interval.
    static TimeScale real_interval(double lo, double hi);

    /// h*Z intersected with [lo, hi].
    static TimeScale uniform_grid(double h, double lo, double hi);

    /// {q^k : k >= min_exponent} intersected with [lo, hi]; optionally with 0
    /// adjoined. q > 1. The exponent floor defaults to 0 (powers from 1 up).
    static TimeScale geometric_grid(double q, bool include_zero, double lo, double hi,
                                    int min_exponent = 0);

    static TimeScale from_points(std::vector<double> xs);

    static TimeScale union_of(const std::vector<TimeScale>& parts);

    /// Parses a descriptor:
    ///   {"kind":"interval","lo":..,"hi":..}
    ///   {"kind":"uniform","h":..,"window":[lo,hi]}
    ///   {"kind":"geometric","q":..,"include_zero":bool,"window":[lo,hi],
    ///    "min_exponent":k (optional)}
    ///   {"kind":"points","xs":[..]}
    ///   {"kind":"union","parts":[descriptor,...]}
    /// Throws ConfigError on malformed input.
    static TimeScale from_json(const nlohmann::json& descriptor);

    bool contains(double t) const;

    /// Canonical stored value nearest to t (within tolerance), or throws
    /// PointNotInScale.
    double snap(double t) const;

    double min() const;
    double max() const;

    /// Forward jump operator; sigma(max) = max.
    double sigma(double t) const;

    /// Backward jump operator; rho(min) = min.
    double rho(double t) const;

    /// Graininess mu(t) = sigma(t) - t.
    double graininess(double t) const;

    PointClass classify(double t) const;

    /// T^kappa: T minus a left-scattered maximum, if there is one.
    TimeScale kappa() const;

    /// All right-scattered points in [a, b) as (t, mu(t)), ascending.
    std::vector<std::pair<double, double>> scattered_points(double a, double b) const;

    /// Maximal positive-length interval pieces of T intersected with [a, b].
    std::vector<ClosedInterval> continuous_runs(double a, double b) const;

    const std::vector<ScalePiece>& pieces() const { return pieces_; }

    Generator generator() const { return gen_; }
    /// Step h (uniform) or ratio q (geometric); 0 otherwise.
    double generator_param() const { return gen_param_; }

    /// Structural equality of the canonical pieces (generator tags ignored).
    bool operator==(const TimeScale& other) const;

    nlohmann::json describe() const;

private:
    TimeScale() = default;
    // Index of the piece containing t, or -1. Tolerant.
    int find_piece(double t) const;

    std::vector<ScalePiece> pieces_;
    Generator gen_ = Generator::none;
    double gen_param_ = 0.0;
};

} // namespace tsfrac
