#include "tsfrac/timescale.hpp"
#include "tsfrac/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tsfrac {
namespace {

constexpr double kTol = TimeScale::kMembershipTol;
constexpr std::size_t kMaxGeneratedPoints = 1u << 20;

} // namespace

double piece_lo(const ScalePiece& p)
{
    if (const auto* iv = std::get_if<ClosedInterval>(&p))
        return iv->lo;
    return std::get<IsolatedPoint>(p).x;
}

double piece_hi(const ScalePiece& p)
{
    if (const auto* iv = std::get_if<ClosedInterval>(&p))
        return iv->hi;
    return std::get<IsolatedPoint>(p).x;
}

TimeScale TimeScale::canonicalize(std::vector<ScalePiece> raw)
{
    if (raw.empty())
        throw EmptyTimeScale("canonicalize called with an empty piece list");
    struct Span {
        double lo, hi;
    };
    std::vector<Span> spans;
    spans.reserve(raw.size());
    for (const ScalePiece& p : raw) {
        const double lo = piece_lo(p), hi = piece_hi(p);
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw Error("timescale", "non-finite piece bound");
        if (lo > hi)
            throw Error("timescale", "interval with lo > hi");
        spans.push_back({lo, hi});
    }
    std::sort(spans.begin(), spans.end(),
              [](const Span& a, const Span& b) { return a.lo < b.lo; });
    std::vector<Span> merged;
    for (const Span& s : spans) {
        if (!merged.empty() && s.lo <= merged.back().hi + kTol)
            merged.back().hi = std::max(merged.back().hi, s.hi);
        else
            merged.push_back(s);
    }
    TimeScale ts;
    ts.pieces_.reserve(merged.size());
    for (const Span& s : merged) {
        if (s.hi - s.lo > kTol)
            ts.pieces_.push_back(ClosedInterval{s.lo, s.hi});
        else
            ts.pieces_.push_back(IsolatedPoint{s.lo});
    }
    return ts;
}

TimeScale TimeScale::real_interval(double lo, double hi)
{
    TimeScale ts = canonicalize({ClosedInterval{lo, hi}});
    ts.gen_ = Generator::real_interval;
    return ts;
}

TimeScale TimeScale::uniform_grid(double h, double lo, double hi)
{
    if (!(h > 0.0))
        throw Error("timescale", "uniform grid step must be positive");
    const double k0 = std::ceil((lo - kTol) / h);
    const double k1 = std::floor((hi + kTol) / h);
    if (k1 < k0)
        throw EmptyTimeScale("uniform grid window contains no grid points");
    if (k1 - k0 + 1 > static_cast<double>(kMaxGeneratedPoints))
        throw Error("timescale", "uniform grid window would materialize too many points");
    std::vector<ScalePiece> pts;
    for (double k = k0; k <= k1; k += 1.0)
        pts.push_back(IsolatedPoint{k * h});
    TimeScale ts = canonicalize(std::move(pts));
    ts.gen_ = Generator::uniform;
    ts.gen_param_ = h;
    return ts;
}

TimeScale TimeScale::geometric_grid(double q, bool include_zero, double lo, double hi,
                                    int min_exponent)
{
    if (!(q > 1.0 + 1e-9))
        throw Error("timescale", "geometric grid ratio must exceed 1");
    std::vector<ScalePiece> pts;
    if (include_zero && lo <= kTol && hi >= -kTol)
        pts.push_back(IsolatedPoint{0.0});
    // Keep the smallest power clear of the membership tolerance around 0.
    const double floor_value = std::max(lo, 10.0 * kTol);
    int k = min_exponent;
    while (std::pow(q, k) < floor_value - kTol)
        ++k;
    std::size_t count = 0;
    for (double p = std::pow(q, k); p <= hi + kTol; p = std::pow(q, ++k)) {
        if (++count > kMaxGeneratedPoints)
            throw Error("timescale", "geometric grid window would materialize too many points");
        pts.push_back(IsolatedPoint{p});
    }
    if (pts.empty())
        throw EmptyTimeScale("geometric grid window contains no points");
    TimeScale ts = canonicalize(std::move(pts));
    ts.gen_ = Generator::geometric;
    ts.gen_param_ = q;
    return ts;
}

TimeScale TimeScale::from_points(std::vector<double> xs)
{
    std::vector<ScalePiece> pts;
    pts.reserve(xs.size());
    for (double x : xs)
        pts.push_back(IsolatedPoint{x});
    return canonicalize(std::move(pts));
}

TimeScale TimeScale::union_of(const std::vector<TimeScale>& parts)
{
    std::vector<ScalePiece> all;
    for (const TimeScale& p : parts)
        all.insert(all.end(), p.pieces_.begin(), p.pieces_.end());
    return canonicalize(std::move(all));
}

int TimeScale::find_piece(double t) const
{
    const auto it = std::upper_bound(
        pieces_.begin(), pieces_.end(), t + kTol,
        [](double v, const ScalePiece& p) { return v < piece_lo(p); });
    if (it == pieces_.begin())
        return -1;
    const int idx = static_cast<int>(it - pieces_.begin()) - 1;
    if (t <= piece_hi(pieces_[static_cast<std::size_t>(idx)]) + kTol)
        return idx;
    return -1;
}

bool TimeScale::contains(double t) const
{
    return find_piece(t) >= 0;
}

double TimeScale::snap(double t) const
{
    const int i = find_piece(t);
    if (i < 0)
        throw PointNotInScale(t, "membership tolerance 1e-12");
    const ScalePiece& p = pieces_[static_cast<std::size_t>(i)];
    if (const auto* iv = std::get_if<ClosedInterval>(&p))
        return std::clamp(t, iv->lo, iv->hi);
    return std::get<IsolatedPoint>(p).x;
}

double TimeScale::min() const
{
    return piece_lo(pieces_.front());
}

double TimeScale::max() const
{
    return piece_hi(pieces_.back());
}

double TimeScale::sigma(double t) const
{
    const double v = snap(t);
    const int i = find_piece(v);
    const ScalePiece& p = pieces_[static_cast<std::size_t>(i)];
    if (const auto* iv = std::get_if<ClosedInterval>(&p)) {
        if (v < iv->hi)
            return v;
    }
    const std::size_t next = static_cast<std::size_t>(i) + 1;
    if (next < pieces_.size())
        return piece_lo(pieces_[next]);
    return v; // sigma(max) = max
}

double TimeScale::rho(double t) const
{
    const double v = snap(t);
    const int i = find_piece(v);
    const ScalePiece& p = pieces_[static_cast<std::size_t>(i)];
    if (const auto* iv = std::get_if<ClosedInterval>(&p)) {
        if (v > iv->lo)
            return v;
    }
    if (i > 0)
        return piece_hi(pieces_[static_cast<std::size_t>(i) - 1]);
    return v; // rho(min) = min
}

double TimeScale::graininess(double t) const
{
    const double v = snap(t);
    return sigma(v) - v;
}

PointClass TimeScale::classify(double t) const
{
    const double v = snap(t);
    PointClass c;
    c.is_min = (v == min());
    c.is_max = (v == max());
    c.right_scattered = sigma(v) > v;
    c.right_dense = !c.right_scattered && !c.is_max;
    c.left_scattered = rho(v) < v;
    c.left_dense = !c.left_scattered && !c.is_min;
    return c;
}

TimeScale TimeScale::kappa() const
{
    if (pieces_.size() >= 2 && std::holds_alternative<IsolatedPoint>(pieces_.back())) {
        TimeScale ts = *this;
        ts.pieces_.pop_back();
        return ts;
    }
    return *this;
}

std::vector<std::pair<double, double>> TimeScale::scattered_points(double a, double b) const
{
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
        const double t = piece_hi(pieces_[i]);
        if (t < a - kTol || t >= b - kTol)
            continue;
        const double mu = piece_lo(pieces_[i + 1]) - t;
        if (mu > 0.0)
            out.emplace_back(t, mu);
    }
    return out;
}

std::vector<ClosedInterval> TimeScale::continuous_runs(double a, double b) const
{
    std::vector<ClosedInterval> out;
    for (const ScalePiece& p : pieces_) {
        const auto* iv = std::get_if<ClosedInterval>(&p);
        if (!iv)
            continue;
        const double lo = std::max(iv->lo, a);
        const double hi = std::min(iv->hi, b);
        if (hi - lo > kTol)
            out.push_back({lo, hi});
    }
    return out;
}

bool TimeScale::operator==(const TimeScale& other) const
{
    if (pieces_.size() != other.pieces_.size())
        return false;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const ScalePiece& a = pieces_[i];
        const ScalePiece& b = other.pieces_[i];
        if (a.index() != b.index())
            return false;
        if (std::abs(piece_lo(a) - piece_lo(b)) > kTol ||
            std::abs(piece_hi(a) - piece_hi(b)) > kTol)
            return false;
    }
    return true;
}

nlohmann::json TimeScale::describe() const
{
    nlohmann::json out;
    out["pieces"] = nlohmann::json::array();
    for (const ScalePiece& p : pieces_) {
        if (const auto* iv = std::get_if<ClosedInterval>(&p))
            out["pieces"].push_back({{"kind", "interval"}, {"lo", iv->lo}, {"hi", iv->hi}});
        else
            out["pieces"].push_back({{"kind", "point"}, {"x", std::get<IsolatedPoint>(p).x}});
    }
    out["min"] = min();
    out["max"] = max();
    return out;
}

namespace {

std::pair<double, double> require_window(const nlohmann::json& j, const char* kind)
{
    if (!j.contains("window") || !j["window"].is_array() || j["window"].size() != 2)
        throw ConfigError(std::string("timescale kind '") + kind +
                          "' requires \"window\": [lo, hi]");
    const double lo = j["window"][0].get<double>();
    const double hi = j["window"][1].get<double>();
    if (!(lo <= hi))
        throw ConfigError("timescale window must satisfy lo <= hi");
    return {lo, hi};
}

double require_number(const nlohmann::json& j, const char* key, const char* kind)
{
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError(std::string("timescale kind '") + kind + "' requires numeric \"" +
                          key + "\"");
    return j[key].get<double>();
}

TimeScale parse_descriptor(const nlohmann::json& j, const nlohmann::json* inherited_window)
{
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ConfigError("timescale descriptor must be an object with a \"kind\" string");
    const std::string kind = j["kind"].get<std::string>();
    nlohmann::json local = j;
    if (!local.contains("window") && inherited_window)
        local["window"] = *inherited_window;

    if (kind == "interval") {
        const double lo = require_number(j, "lo", "interval");
        const double hi = require_number(j, "hi", "interval");
        if (!(lo < hi))
            throw ConfigError("interval descriptor needs lo < hi");
        return TimeScale::real_interval(lo, hi);
    }
    if (kind == "uniform") {
        const double h = require_number(j, "h", "uniform");
        if (!(h > 0.0))
            throw ConfigError("uniform descriptor requires h > 0");
        const auto [lo, hi] = require_window(local, "uniform");
        return TimeScale::uniform_grid(h, lo, hi);
    }
    if (kind == "geometric") {
        const double q = require_number(j, "q", "geometric");
        if (!(q > 1.0))
            throw ConfigError("geometric descriptor requires q > 1");
        const auto [lo, hi] = require_window(local, "geometric");
        const bool include_zero = j.value("include_zero", false);
        const int min_exponent = j.value("min_exponent", 0);
        return TimeScale::geometric_grid(q, include_zero, lo, hi, min_exponent);
    }
    if (kind == "points") {
        if (!j.contains("xs") || !j["xs"].is_array() || j["xs"].empty())
            throw ConfigError("points descriptor requires a nonempty \"xs\" array");
        std::vector<double> xs;
        for (const auto& v : j["xs"])
            xs.push_back(v.get<double>());
        return TimeScale::from_points(std::move(xs));
    }
    if (kind == "union") {
        if (!j.contains("parts") || !j["parts"].is_array() || j["parts"].empty())
            throw ConfigError("union descriptor requires a nonempty \"parts\" array");
        const nlohmann::json* win = local.contains("window") ? &local["window"] : nullptr;
        std::vector<TimeScale> parts;
        for (const auto& part : j["parts"])
            parts.push_back(parse_descriptor(part, win));
        return TimeScale::union_of(parts);
    }
    throw ConfigError("unknown timescale kind '" + kind + "'");
}

} // namespace

TimeScale TimeScale::from_json(const nlohmann::json& descriptor)
{
    return parse_descriptor(descriptor, nullptr);
}

} // namespace tsfrac
