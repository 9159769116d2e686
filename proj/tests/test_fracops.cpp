#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "tsfrac/errors.hpp"
#include "tsfrac/fracops.hpp"
#include "tsfrac/gamma.hpp"
#include "tsfrac/oracle.hpp"

using namespace tsfrac;

namespace {
const double kSqrtPi = std::sqrt(std::numbers::pi);

FracOpSpec unit_spec(double alpha) {
    FracOpSpec s;
    s.alpha = alpha;
    s.a = 0.0;
    s.scale = TimeScale::real_interval(0.0, 1.0);
    return s;
}
} // namespace

TEST_CASE("half integral of constants and powers on [0,1]") {
    FracOpSpec s = unit_spec(0.5);
    auto one = [](double) { return 1.0; };
    auto id = [](double t) { return t; };
    CHECK(frac_integral(s, one, 1.0) == doctest::Approx(2.0 / kSqrtPi).epsilon(1e-10));
    CHECK(frac_integral(s, id, 1.0) == doctest::Approx(4.0 / (3.0 * kSqrtPi)).epsilon(1e-10));
    CHECK(frac_integral(s, one, 0.0) == 0.0);
}

TEST_CASE("half derivative recovers known closed forms") {
    FracOpSpec s = unit_spec(0.5);
    auto id = [](double t) { return t; };
    auto root = [](double t) { return std::sqrt(t); };
    // D^(1/2) t = 2 sqrt(t/pi); D^(1/2) sqrt(t) = Gamma(1.5)
    CHECK(frac_derivative(s, id, 0.49) ==
          doctest::Approx(2.0 * std::sqrt(0.49 / std::numbers::pi)).epsilon(1e-7));
    CHECK(frac_derivative(s, root, 0.49) ==
          doctest::Approx(gamma_fn(1.5)).epsilon(1e-7));
}

TEST_CASE("generalized operators reduce to classical ones for z = id") {
    auto h = [](double t) { return std::sin(t) + 2.0; };
    for (double alpha : {0.3, 0.7}) {
        FracOpSpec s = unit_spec(alpha);
        CHECK(gen_frac_integral(s, h, 0.7) ==
              doctest::Approx(frac_integral(s, h, 0.7)).epsilon(1e-9));
        CHECK(gen_frac_derivative(s, h, 0.7) ==
              doctest::Approx(frac_derivative(s, h, 0.7)).epsilon(1e-6));
    }
}

TEST_CASE("weighted integral of constant data has a closed form") {
    FracOpSpec s = unit_spec(0.6);
    s.z = ExprFn::parse("exp(t)", {"t"});
    auto one = [](double) { return 1.0; };
    double t = 0.8;
    double want = std::pow(std::exp(t) - 1.0, 0.6) / gamma_fn(1.6);
    CHECK(gen_frac_integral(s, one, t) == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("weighted derivative inverts the weighted integral") {
    FracOpSpec s = unit_spec(0.5);
    s.z = ExprFn::parse("t^2 + t", {"t"});
    auto one = [](double) { return 1.0; };
    auto I = [&](double t) { return gen_frac_integral(s, one, t); };
    CHECK(gen_frac_derivative(s, I, 0.6) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("discrete integral matches a two-term hand computation") {
    FracOpSpec s;
    s.alpha = 0.5;
    s.a = 0.0;
    s.scale = TimeScale::from_points({0.0, 1.0, 2.0});
    auto one = [](double) { return 1.0; };

    SUBCASE("classical") {
        // (1/Gamma(1/2)) [ (2-0)^(-1/2) * 1 + (2-1)^(-1/2) * 1 ]
        double want = (1.0 / std::sqrt(2.0) + 1.0) / kSqrtPi;
        CHECK(frac_integral(s, one, 2.0) == doctest::Approx(want).epsilon(1e-14));
    }
    SUBCASE("weighted by t^2") {
        s.z = ExprFn::parse("t^2", {"t"});
        // (1/Gamma(1/2)) [ (4-0)^(-1/2) * (1-0) + (4-1)^(-1/2) * (4-1) ]
        double want = (0.5 + std::sqrt(3.0)) / kSqrtPi;
        CHECK(gen_frac_integral(s, one, 2.0) == doctest::Approx(want).epsilon(1e-14));
    }
}

TEST_CASE("discrete derivative is an exact difference of kernel integrals") {
    FracOpSpec s;
    s.alpha = 0.5;
    s.a = 0.0;
    s.scale = TimeScale::uniform_grid(1.0, 0.0, 5.0);
    auto h = [](double t) { return 1.0 + t; };
    // V(t) = I^(1/2) h; D^(1/2) h (4) = (V(5) - V(4)) / Gamma(1/2)
    auto V = [&](double t) {
        double acc = 0.0;
        for (double u = 0.0; u < t; u += 1.0) acc += std::pow(t - u, -0.5) * h(u);
        return acc / kSqrtPi;
    };
    double want = V(5.0) - V(4.0); // graininess 1 cancels, Gamma already inside V
    CHECK(frac_derivative(s, h, 4.0) == doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("semigroup defect vanishes on the real line") {
    FracOpSpec s = unit_spec(0.5);
    auto h = [](double t) { return 1.0 + t / 2.0; };
    CHECK(std::abs(semigroup_defect(s, h, 0.3, 0.4, 1.0)) <= 1e-6);
}

TEST_CASE("discrete semigroup defect agrees with nested oracle sums") {
    TimeScale z6 = TimeScale::uniform_grid(1.0, 0.0, 6.0);
    ExprFn id = ExprFn::identity();
    ExprFn one = ExprFn::parse("1", {"s"});
    FracOpSpec s;
    s.alpha = 0.5;
    s.a = 0.0;
    s.scale = z6;

    double defect = semigroup_defect(s, one, 0.5, 0.5, 4.0);

    // Reconstruct both sides from the independent summation oracle.
    double lhs = 0.0;
    for (auto [u, mu] : z6.scattered_points(0.0, 4.0)) {
        double inner = oracle::discrete_frac_sum(z6, 0.5, id, one, 0.0, u);
        lhs += std::pow(4.0 - u, -0.5) * mu * inner;
    }
    lhs /= kSqrtPi;
    double rhs = oracle::discrete_frac_sum(z6, 1.0, id, one, 0.0, 4.0);

    CHECK(defect == doctest::Approx(lhs - rhs).epsilon(1e-13));
    CHECK(semigroup_defect(s, one, 0.5, 0.5, 4.0) == defect); // deterministic
}

TEST_CASE("semigroup defect validates orders") {
    FracOpSpec s = unit_spec(0.5);
    auto one = [](double) { return 1.0; };
    CHECK_THROWS_AS(semigroup_defect(s, one, 0.6, 0.6, 1.0), Error);
    CHECK_THROWS_AS(semigroup_defect(s, one, 0.0, 0.5, 1.0), Error);
}

TEST_CASE("non-monotone weights are rejected") {
    FracOpSpec s;
    s.alpha = 0.5;
    s.a = 0.0;
    s.scale = TimeScale::real_interval(0.0, 4.0);
    s.z = ExprFn::parse("sin(t)", {"t"});
    auto one = [](double) { return 1.0; };
    CHECK_THROWS_AS(gen_frac_integral(s, one, 4.0), NonMonotoneWeight);
    s.z = ExprFn::parse("0 - t", {"t"});
    CHECK_THROWS_AS(gen_frac_integral(s, one, 4.0), NonMonotoneWeight);
}

TEST_CASE("vanishing weight derivative blocks the weighted derivative") {
    FracOpSpec s = unit_spec(0.5);
    s.z = ExprFn::parse("t^3", {"t"});
    auto one = [](double) { return 1.0; };
    CHECK_THROWS_AS(gen_frac_derivative(s, one, 0.0), ZeroWeightDerivative);
}

TEST_CASE("operators validate membership and order") {
    FracOpSpec s = unit_spec(0.5);
    auto one = [](double) { return 1.0; };
    CHECK_THROWS_AS(frac_integral(s, one, 2.0), Error);   // t outside the scale
    s.alpha = 1.5;
    CHECK_THROWS_AS(frac_integral(s, one, 0.5), Error);   // order outside (0,1)
}

TEST_CASE("grid functions interpolate linearly and clamp") {
    GridFunction g({0.0, 1.0, 2.0}, {0.0, 2.0, 6.0});
    CHECK(g(0.5) == 1.0);
    CHECK(g(1.5) == 4.0);
    CHECK(g(1.0) == 2.0);
    CHECK(g(-1.0) == 0.0);
    CHECK(g(3.0) == 6.0);
    CHECK_THROWS_AS(GridFunction({1.0, 0.0}, {0.0, 0.0}), Error);
    CHECK_THROWS_AS(GridFunction({0.0, 1.0}, {0.0}), Error);
}
