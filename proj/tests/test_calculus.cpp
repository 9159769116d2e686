#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tsfrac/calculus.hpp"
#include "tsfrac/errors.hpp"
#include "tsfrac/timescale.hpp"

using namespace tsfrac;

namespace {
const TimeScale kZ10 = TimeScale::uniform_grid(1.0, 0.0, 10.0);
const TimeScale kUnit = TimeScale::real_interval(0.0, 1.0);
// {0, 0.5} u [1, 2] u {2.5, 3}
const TimeScale kMixed = TimeScale::canonicalize({IsolatedPoint{0.0}, IsolatedPoint{0.5},
                                                  ClosedInterval{1.0, 2.0},
                                                  IsolatedPoint{2.5}, IsolatedPoint{3.0}});
} // namespace

TEST_CASE("delta derivative is the forward difference at scattered points") {
    auto sq = [](double t) { return t * t; };
    CHECK(delta_derivative(sq, kZ10, 3.0) == 7.0); // (16 - 9) / 1
    CHECK(delta_derivative(sq, kMixed, 0.5) == doctest::Approx((1.0 - 0.25) / 0.5));
}

TEST_CASE("delta derivative matches the ordinary derivative on dense parts") {
    auto sq = [](double t) { return t * t; };
    CHECK(delta_derivative(sq, kUnit, 0.5) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(delta_derivative(sq, kUnit, 0.0) == doctest::Approx(0.0).epsilon(1e-8));
    // left-dense maximum: differentiable from the left
    CHECK(delta_derivative(sq, kUnit, 1.0) == doctest::Approx(2.0).epsilon(1e-7));
    auto osc = [](double t) { return std::sin(3.0 * t); };
    CHECK(delta_derivative(osc, kUnit, 0.4) ==
          doctest::Approx(3.0 * std::cos(1.2)).epsilon(1e-8));
}

TEST_CASE("delta derivative rejects a left-scattered maximum") {
    auto id = [](double t) { return t; };
    CHECK_THROWS_AS(delta_derivative(id, kZ10, 10.0), NotInKappa);
    CHECK_THROWS_AS(delta_derivative(id, kMixed, 3.0), NotInKappa);
}

TEST_CASE("delta derivative reports non-convergence at a kink") {
    auto kink = [](double t) { return std::sqrt(std::abs(t - 0.5)); };
    CHECK_THROWS_AS(delta_derivative(kink, kUnit, 0.5), NoConvergence);
}

TEST_CASE("delta integral sums scattered points and integrates runs") {
    auto id = [](double t) { return t; };
    CHECK(delta_integral(id, kZ10, 0.0, 3.0) == 3.0); // 0 + 1 + 2
    CHECK(delta_integral(id, TimeScale::real_interval(0.0, 3.0), 0.0, 3.0) ==
          doctest::Approx(4.5).epsilon(1e-12));
    // mixed: 0*0.5 + 0.5*0.5 + int_1^2 t dt + 2*0.5 + 2.5*0.5
    auto want = 0.0 * 0.5 + 0.5 * 0.5 + 1.5 + 2.0 * 0.5 + 2.5 * 0.5;
    CHECK(delta_integral(id, kMixed, 0.0, 3.0) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("delta integral respects orientation conventions") {
    auto one = [](double) { return 1.0; };
    CHECK(delta_integral(one, kZ10, 3.0, 3.0) == 0.0);
    CHECK(delta_integral(one, kZ10, 0.0, 10.0) == 10.0);
}

TEST_CASE("split identity holds on scattered and dense left endpoints") {
    auto f = [](double t) { return std::exp(t / 3.0); };
    for (auto [ts, a, b] : {std::tuple{kZ10, 2.0, 7.0}, std::tuple{kMixed, 0.5, 3.0},
                            std::tuple{kUnit, 0.25, 1.0}}) {
        auto [lhs, rhs] = split_identity_check(f, ts, a, b);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("step extension agrees with the delta integral") {
    auto f = [](double s) { return s * s; }; // increasing on [0, 3]
    RealExtension ext(f, kMixed, 0.0, 3.0);
    SUBCASE("values") {
        CHECK(ext(0.25) == 0.0);         // gap (0, 0.5) takes f(0)
        CHECK(ext(0.75) == 0.25);        // gap (0.5, 1) takes f(0.5)
        CHECK(ext(1.5) == 2.25);         // on the run
        CHECK(ext(2.25) == 4.0);         // gap (2, 2.5) takes f(2)
        CHECK(ext(2.75) == 6.25);        // gap (2.5, 3) takes f(2.5)
    }
    SUBCASE("integral") {
        double direct = delta_integral(f, kMixed, 0.0, 3.0);
        CHECK(ext.integrate() == doctest::Approx(direct).epsilon(1e-10));
        // 0*.5 + .25*.5 + 7/3 + 4*.5 + 6.25*.5
        CHECK(direct == doctest::Approx(0.125 + 7.0 / 3.0 + 2.0 + 3.125).epsilon(1e-12));
    }
}

TEST_CASE("step extension spot-checks monotonicity") {
    auto dec = [](double s) { return -s; };
    CHECK_THROWS_AS(RealExtension(dec, kZ10, 0.0, 10.0), NotIncreasing);
}

TEST_CASE("endpoint-weighted quadrature integrates an inverse square root") {
    QuadratureSpec q;
    q.endpoint_exponent = -0.5;
    auto f = [](double s) { return 1.0 / std::sqrt(1.0 - s); };
    CHECK(delta_integral(f, kUnit, 0.0, 1.0, q) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("plain adaptive quadrature is accurate") {
    auto f = [](double s) { return std::exp(s); };
    CHECK(delta_integral(f, kUnit, 0.0, 1.0) ==
          doctest::Approx(std::numbers::e - 1.0).epsilon(1e-12));
}
