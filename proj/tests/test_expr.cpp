#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "tsfrac/errors.hpp"
#include "tsfrac/expr.hpp"

using namespace tsfrac;

namespace {
const std::vector<std::string> kT = {"t"};
const std::vector<std::string> kTY = {"t", "y"};

double eval1(const std::string& src, double t) { return ExprFn::parse(src, kT)(t); }
} // namespace

TEST_CASE("arithmetic and precedence") {
    CHECK(eval1("1 + t/3", 3.0) == 2.0);
    CHECK(eval1("2*t + 1", 4.0) == 9.0);
    CHECK(eval1("(1+2)*3^2", 0.0) == 27.0);
    CHECK(eval1("2^3^2", 0.0) == 512.0);  // right-associative
    CHECK(eval1("-2^2", 0.0) == -4.0);    // unary minus binds looser than ^
    CHECK(eval1("3 - 2 - 1", 0.0) == 0.0);
    CHECK(eval1("8/4/2", 0.0) == 1.0);
    CHECK(eval1(" 1+ t ", 1.5) == eval1("1+t", 1.5));
}

TEST_CASE("builtin functions") {
    CHECK(eval1("sqrt(t)", 9.0) == 3.0);
    CHECK(eval1("exp(0)", 0.0) == 1.0);
    CHECK(eval1("ln(exp(2))", 0.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(eval1("sin(0)", 0.0) == 0.0);
    CHECK(eval1("cos(0)", 0.0) == 1.0);
    CHECK(eval1("abs(0 - t)", 5.0) == 5.0);
    CHECK(eval1("pow(t, 3)", 2.0) == 8.0);
    CHECK(eval1("gamma(5)", 0.0) == doctest::Approx(24.0).epsilon(1e-14));
}

TEST_CASE("two-variable signature") {
    ExprFn f = ExprFn::parse("1 + y/2", kTY);
    CHECK(f.arity() == 2);
    CHECK(f(0.0, 4.0) == 3.0);
    CHECK(f(100.0, 4.0) == 3.0); // t unused but declared
}

TEST_CASE("syntax errors carry positions") {
    try {
        ExprFn::parse("t*(", kT);
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.position == 3);
    }
    CHECK_THROWS_AS(ExprFn::parse("", kT), SyntaxError);
    CHECK_THROWS_AS(ExprFn::parse("1 +", kT), SyntaxError);
    CHECK_THROWS_AS(ExprFn::parse("(1", kT), SyntaxError);
    CHECK_THROWS_AS(ExprFn::parse("1 2", kT), SyntaxError);
}

TEST_CASE("identifier and arity checks") {
    CHECK_THROWS_AS(ExprFn::parse("foo(t)", kT), UnknownIdentifier);
    CHECK_THROWS_AS(ExprFn::parse("q + t", kT), UnknownIdentifier);
    CHECK_THROWS_AS(ExprFn::parse("y", kT), UndeclaredVariable);
    CHECK_THROWS_AS(ExprFn::parse("pow(t)", kT), ArityMismatch);
    CHECK_THROWS_AS(ExprFn::parse("sqrt(t, 1)", kT), ArityMismatch);
}

TEST_CASE("domain errors at evaluation") {
    CHECK_THROWS_AS(eval1("sqrt(0 - 1)", 0.0), DomainError);
    CHECK_THROWS_AS(eval1("ln(t)", 0.0), DomainError);
    CHECK_THROWS_AS(eval1("ln(0 - 1)", 0.0), DomainError);
    CHECK_THROWS_AS(eval1("(0 - 2)^0.5", 0.0), DomainError);
    CHECK(eval1("(0 - 2)^2", 0.0) == 4.0); // integer exponents of negatives are fine
    CHECK_THROWS_AS(eval1("gamma(0)", 0.0), DomainError);
}

TEST_CASE("pretty form reparses to an equal tree") {
    for (const char* src : {"1 + t/3", "-t^2", "2^3^2", "pow(t, 1 + t)",
                            "sin(t)*cos(t) - abs(t)/(t + 4)", "0.1", "1e-3 * t"}) {
        ExprFn a = ExprFn::parse(src, kT);
        ExprFn b = ExprFn::parse(a.pretty(), kT);
        CHECK(ast_equal(a.ast(), b.ast()));
        CHECK(a(0.7) == b(0.7));
    }
}

namespace {
// Random expression source, depth-bounded, never dividing by anything that
// can vanish and keeping pow bases positive so evaluation stays in-domain.
std::string random_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 6);
    std::uniform_real_distribution<double> c(0.1, 4.0);
    switch (pick(rng)) {
    case 0: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", c(rng));
        return buf;
    }
    case 1: return "t";
    case 2: return "(" + random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1) + ")";
    case 3: return "(" + random_expr(rng, depth - 1) + " * " + random_expr(rng, depth - 1) + ")";
    case 4: return "sin(" + random_expr(rng, depth - 1) + ")";
    case 5: return "exp(0 - abs(" + random_expr(rng, depth - 1) + "))";
    default: return "-" + random_expr(rng, depth - 1);
    }
}
} // namespace

TEST_CASE("pretty round-trip on random expressions") {
    std::mt19937_64 rng(20250819);
    for (int i = 0; i < 200; ++i) {
        std::string src = random_expr(rng, 4);
        ExprFn a = ExprFn::parse(src, kT);
        ExprFn b = ExprFn::parse(a.pretty(), kT);
        CHECK(ast_equal(a.ast(), b.ast()));
        for (double t : {-1.3, 0.0, 2.7})
            CHECK(a(t) == b(t)); // bit-identical: same tree, same evaluation
    }
}

TEST_CASE("evaluation is deterministic") {
    ExprFn f = ExprFn::parse("sin(t)*exp(t/7) + gamma(t + 3)", kT);
    CHECK(f(1.234567) == f(1.234567));
}

TEST_CASE("constants survive the pretty form exactly") {
    ExprFn a = ExprFn::parse("0.1", kT);
    ExprFn b = ExprFn::parse(a.pretty(), kT);
    CHECK(a(0.0) == b(0.0));
    CHECK(a(0.0) == 0.1);
}
