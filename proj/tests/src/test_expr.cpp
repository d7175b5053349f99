#include "doctest.h"

#include <orbistab/expr.hpp>

#include <cmath>

using namespace orbistab;

TEST_CASE("expression arithmetic and precedence") {
  auto f = compile_expression("2 + 3*4^2");
  CHECK(f(0, 0) == doctest::Approx(50.0));

  // power binds right
  auto g = compile_expression("2^3^2");
  CHECK(g(0, 0) == doctest::Approx(512.0));

  auto h = compile_expression("-x1^2");
  CHECK(h(3.0, 0) == doctest::Approx(-9.0));

  auto q = compile_expression("(x1 + x2)/(x1 - x2)");
  CHECK(q(5.0, 3.0) == doctest::Approx(4.0));
}

TEST_CASE("expression functions and constants") {
  auto f = compile_expression("sin(x1)^2 + cos(x1)^2");
  CHECK(f(0.7, 0) == doctest::Approx(1.0));

  auto g = compile_expression("sec(x1) * cos(x1)");
  CHECK(g(1.2, 0) == doctest::Approx(1.0));

  auto e = compile_expression("ln(exp(x2))");
  CHECK(e(0, -2.5) == doctest::Approx(-2.5));

  auto p = compile_expression("cos(pi)");
  CHECK(p(0, 0) == doctest::Approx(-1.0));

  auto c = compile_expression("a*x1 + b", {{"a", 2.0}, {"b", -1.0}});
  CHECK(c(3.0, 0) == doctest::Approx(5.0));

  auto s = compile_expression("sqrt(abs(x1))");
  CHECK(s(-16.0, 0) == doctest::Approx(4.0));

  auto t = compile_expression("tan(x1)");
  CHECK(t(0.4, 0) == doctest::Approx(std::tan(0.4)));
}

TEST_CASE("expression parse errors carry position info") {
  CHECK_THROWS_AS(compile_expression("(x1 + 2"), ConfigError);
  CHECK_THROWS_AS(compile_expression("x1 + unknown"), ConfigError);
  CHECK_THROWS_AS(compile_expression("x1 5"), ConfigError);
  CHECK_THROWS_AS(compile_expression(""), ConfigError);
  CHECK_THROWS_AS(compile_expression("1 + * 2"), ConfigError);
}

TEST_CASE("expression evaluation is IEEE, not throwing") {
  auto f = compile_expression("sqrt(x1)");
  CHECK(std::isnan(f(-1.0, 0)));
  auto g = compile_expression("1/x1");
  CHECK(std::isinf(g(0.0, 0)));
  auto h = compile_expression("ln(x1)");
  CHECK(std::isnan(h(-1.0, 0)));
}

TEST_CASE("profile compilation rejects x2") {
  CHECK_NOTHROW(compile_profile("sin(x1)"));
  CHECK_THROWS_AS(compile_profile("x1 + x2"), ConfigError);
  auto p = compile_profile("x1^3");
  CHECK(p(2.0) == doctest::Approx(8.0));
}
