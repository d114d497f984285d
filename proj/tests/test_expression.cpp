#include <catch2/catch_amalgamated.hpp>

#include "vexlab/expression.hpp"

using vexlab::Expression;
using vexlab::ParseError;

TEST_CASE("expression: literals, coordinates and arithmetic", "[expression]") {
  CHECK(Expression::parse("2").eval(0.0) == 2.0);
  CHECK(Expression::parse("2+3*4").eval(0.0) == 14.0);
  CHECK(Expression::parse("(2+3)*4").eval(0.0) == 20.0);
  CHECK(Expression::parse("2.2+0.2*x").eval(0.5) == Catch::Approx(2.3));
  CHECK(Expression::parse("x*y").eval(3.0, 4.0) == 12.0);
  CHECK(Expression::parse("-x").eval(2.0) == -2.0);
  CHECK(Expression::parse("2^3^2").eval(0.0) == 512.0);  // right-assoc
  CHECK(Expression::parse("7/2").eval(0.0) == 3.5);
}

TEST_CASE("expression: functions and constants", "[expression]") {
  CHECK(Expression::parse("sin(pi/2)").eval(0.0) == Catch::Approx(1.0));
  CHECK(Expression::parse("cos(0)").eval(0.0) == 1.0);
  CHECK(Expression::parse("exp(1)").eval(0.0) == Catch::Approx(2.718281828459045));
  CHECK(Expression::parse("abs(-3)").eval(0.0) == 3.0);
  CHECK(Expression::parse("min(2, x)").eval(5.0) == 2.0);
  CHECK(Expression::parse("max(2, x)").eval(5.0) == 5.0);
  CHECK(Expression::parse("2+sin(pi*x)/2").eval(0.5) == Catch::Approx(2.5));
}

TEST_CASE("expression: parse errors carry position and text", "[expression]") {
  CHECK_THROWS_AS(Expression::parse("2+*x"), ParseError);
  CHECK_THROWS_AS(Expression::parse("sin(x"), ParseError);
  CHECK_THROWS_AS(Expression::parse("foo(x)"), ParseError);
  CHECK_THROWS_AS(Expression::parse("min(x)"), ParseError);
  CHECK_THROWS_AS(Expression::parse("1 2"), ParseError);
  try {
    Expression::parse("2+*x");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("2+*x") != std::string::npos);
  }
}
