#include "doctest.h"
#include "driftlab/expr.hpp"

#include <cmath>

using namespace driftlab;

TEST_CASE("parse and evaluate basic expressions") {
  CHECK(parse_expr("1+2*3").eval({0, 0, 0}) == doctest::Approx(7.0));
  CHECK(parse_expr("(1+2)*3").eval({0, 0, 0}) == doctest::Approx(9.0));
  CHECK(parse_expr("-x1 + x2/2").eval({1.0, 4.0, 0.0}) == doctest::Approx(1.0));
  CHECK(parse_expr("sin(pi*x1)").eval({0.5, 0, 0}) == doctest::Approx(1.0));
  CHECK(parse_expr("exp(0)").eval({0, 0, 0}) == doctest::Approx(1.0));
  CHECK(parse_expr("abs(0-3)").eval({0, 0, 0}) == doctest::Approx(3.0));
  CHECK(parse_expr("min(2, x3)").eval({0, 0, 5.0}) == doctest::Approx(2.0));
  CHECK(parse_expr("max(2, x3)").eval({0, 0, 5.0}) == doctest::Approx(5.0));
  CHECK(parse_expr("ifpos(x1 - 1, 10, 20)").eval({2.0, 0, 0}) == doctest::Approx(10.0));
  CHECK(parse_expr("ifpos(x1 - 1, 10, 20)").eval({0.5, 0, 0}) == doctest::Approx(20.0));
  CHECK(parse_expr("s*s").eval({0, 0, 0}, 3.0) == doctest::Approx(9.0));
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_expr("x4"), ExprError);
  CHECK_THROWS_AS(parse_expr("sin()"), ExprError);
  CHECK_THROWS_AS(parse_expr("1 +"), ExprError);
  CHECK_THROWS_AS(parse_expr("min(1)"), ExprError);
  CHECK_THROWS_AS(parse_expr("frob(1)"), ExprError);
  CHECK_THROWS_AS(parse_expr("1 2"), ExprError);
}

TEST_CASE("symbolic derivative matches central differences") {
  const auto exprs = {"sin(pi*x1)*sin(pi*x2)", "x1*x1*x2 + exp(x2/2)",
                      "cos(2*x1) / (1 + x2*x2)", "s*s*x1"};
  const std::array<double, 3> x{0.3, 0.7, 0.0};
  const double s = 1.3, eps = 1e-6;
  for (const char* text : exprs) {
    const Expr e = parse_expr(text);
    for (int var = 0; var < 4; ++var) {
      auto at = [&](double shift) {
        std::array<double, 3> xx = x;
        double ss = s;
        if (var < 3)
          xx[var] += shift;
        else
          ss += shift;
        return e.eval(xx, ss);
      };
      const double fd = (at(eps) - at(-eps)) / (2 * eps);
      CHECK(e.diff(var).eval(x, s) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("a.e. derivative of kinks picks the active branch") {
  const Expr e = parse_expr("abs(x1)");
  CHECK(e.diff(0).eval({2.0, 0, 0}) == doctest::Approx(1.0));
  CHECK(e.diff(0).eval({-2.0, 0, 0}) == doctest::Approx(-1.0));
  const Expr m = parse_expr("min(x1, x2)");
  CHECK(m.diff(0).eval({1.0, 5.0, 0}) == doctest::Approx(1.0));
  CHECK(m.diff(0).eval({5.0, 1.0, 0}) == doctest::Approx(0.0));
  CHECK(parse_expr("sin(x1)").has_kinks() == false);
  CHECK(m.has_kinks() == true);
}

TEST_CASE("programmatic construction") {
  const Expr u = Expr::sin(Expr::constant(M_PI) * Expr::var(0));
  const Expr d = u.diff(0);
  CHECK(d.eval({0.0, 0, 0}) == doctest::Approx(M_PI));
}
