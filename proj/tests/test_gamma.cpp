#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tsfrac/errors.hpp"
#include "tsfrac/gamma.hpp"

using namespace tsfrac;

TEST_CASE("gamma matches std::tgamma on [0.5, 20]") {
    for (double x = 0.5; x <= 20.0; x += 0.125) {
        double want = std::tgamma(x);
        CHECK(std::abs(gamma_fn(x) - want) <= 1e-12 * std::abs(want));
    }
}

TEST_CASE("half-integer and integer values") {
    double spi = std::sqrt(std::numbers::pi);
    CHECK(gamma_fn(0.5) == doctest::Approx(spi).epsilon(1e-14));
    CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gamma_fn(1.5) == doctest::Approx(0.5 * spi).epsilon(1e-14));
    CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-14));
}

TEST_CASE("reflection handles negative arguments") {
    double spi = std::sqrt(std::numbers::pi);
    CHECK(gamma_fn(-0.5) == doctest::Approx(-2.0 * spi).epsilon(1e-12));
    CHECK(gamma_fn(-1.5) == doctest::Approx(4.0 * spi / 3.0).epsilon(1e-12));
}

TEST_CASE("poles throw") {
    CHECK_THROWS_AS(gamma_fn(0.0), DomainError);
    CHECK_THROWS_AS(gamma_fn(-1.0), DomainError);
    CHECK_THROWS_AS(gamma_fn(-7.0), DomainError);
}

TEST_CASE("reciprocal gamma is total") {
    CHECK(reciprocal_gamma(0.0) == 0.0);
    CHECK(reciprocal_gamma(-3.0) == 0.0);
    for (double x : {0.25, 0.5, 1.0, 2.5, 7.0, -0.5})
        CHECK(reciprocal_gamma(x) * gamma_fn(x) == doctest::Approx(1.0).epsilon(1e-13));
}
