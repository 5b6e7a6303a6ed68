#include "doctest.h"

#include "dispersim/expr.hpp"

#include <cmath>

using namespace dispersim;

TEST_CASE("expression arithmetic and precedence") {
    CHECK(Expression::parse("1+2*3").eval(0) == doctest::Approx(7.0));
    CHECK(Expression::parse("(1+2)*3").eval(0) == doctest::Approx(9.0));
    CHECK(Expression::parse("2*3+4*5").eval(0) == doctest::Approx(26.0));
    CHECK(Expression::parse("7/2").eval(0) == doctest::Approx(3.5));
    CHECK(Expression::parse("2^3^2").eval(0) == doctest::Approx(512.0));  // right assoc
    CHECK(Expression::parse("-2^2").eval(0) == doctest::Approx(-4.0));
    CHECK(Expression::parse("2^-1").eval(0) == doctest::Approx(0.5));
    CHECK(Expression::parse("1 - 2 - 3").eval(0) == doctest::Approx(-4.0));
    CHECK(Expression::parse("12/3/2").eval(0) == doctest::Approx(2.0));
    CHECK(Expression::parse(" + 5 ").eval(0) == doctest::Approx(5.0));
    CHECK(Expression::parse("0.5e1 + .25").eval(0) == doctest::Approx(5.25));
}

TEST_CASE("expression variables") {
    auto e = Expression::parse("xi1 - xi2 + xi3");
    CHECK(e.eval(1.0, 2.0, 3.0) == doctest::Approx(2.0));
    CHECK(Expression::parse("xi1*xi2*xi3").eval(2.0, 3.0, 4.0) == doctest::Approx(24.0));
    CHECK(Expression::parse("xi").eval(1.5) == doctest::Approx(1.5));  // alias of xi1
    CHECK(Expression::parse("xi^2/2").eval(3.0) == doctest::Approx(4.5));
}

TEST_CASE("expression functions and constants") {
    CHECK(Expression::parse("sin(pi/2)").eval(0) == doctest::Approx(1.0));
    CHECK(Expression::parse("exp(0)").eval(0) == doctest::Approx(1.0));
    CHECK(Expression::parse("sqrt(xi1^2+1)").eval(2.0) == doctest::Approx(std::sqrt(5.0)));
    CHECK(Expression::parse("cos(xi)^2 + sin(xi)^2").eval(0.37) == doctest::Approx(1.0));
    CHECK(Expression::parse("exp(log(5))").eval(0) == doctest::Approx(5.0));
    CHECK(Expression::parse("abs(-3.5)").eval(0) == doctest::Approx(3.5));
    CHECK(Expression::parse("asinh(sinh(1.2))").eval(0) == doctest::Approx(1.2));
    CHECK(Expression::parse("tanh(100)").eval(0) == doctest::Approx(1.0));
}

TEST_CASE("expression parse errors") {
    CHECK_THROWS_AS(Expression::parse("xi4"), DispersimError);
    CHECK_THROWS_AS(Expression::parse("1+"), DispersimError);
    CHECK_THROWS_AS(Expression::parse("(1+2"), DispersimError);
    CHECK_THROWS_AS(Expression::parse("sin 2"), DispersimError);
    CHECK_THROWS_AS(Expression::parse("1 2"), DispersimError);
    CHECK_THROWS_AS(Expression::parse(""), DispersimError);
    CHECK_THROWS_AS(Expression::parse("foo(1)"), DispersimError);
    CHECK_THROWS_AS(Expression::parse("1 $ 2"), DispersimError);
    CHECK_THROWS_AS(Expression::parse("()"), DispersimError);
}
