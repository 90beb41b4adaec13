#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "kdual/expr.hpp"

using namespace kdual;

namespace {

// Random smooth expression in x (no abs/max/min, no kinks, safe domains).
std::string random_smooth(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 7);
  std::uniform_real_distribution<double> coef(0.2, 2.5);
  switch (pick(rng)) {
    case 0: return "x";
    case 1: return std::to_string(coef(rng));
    case 2: return "(" + std::to_string(coef(rng)) + "*x)";
    case 3: return "(" + random_smooth(rng, depth - 1) + "+" + random_smooth(rng, depth - 1) + ")";
    case 4: return "(" + random_smooth(rng, depth - 1) + "*" + random_smooth(rng, depth - 1) + ")";
    case 5: return "sin(" + random_smooth(rng, depth - 1) + ")";
    case 6: return "cos(" + random_smooth(rng, depth - 1) + ")";
    default: return "exp(0.3*sin(" + random_smooth(rng, depth - 1) + "))";
  }
}

}  // namespace

TEST_CASE("parse and eval basics") {
  CHECK(Expr::parse("1+2*3")(0.0) == doctest::Approx(7.0));
  CHECK(Expr::parse("(1+2)*3")(0.0) == doctest::Approx(9.0));
  CHECK(Expr::parse("2^3^2")(0.0) == doctest::Approx(512.0));  // right assoc
  CHECK(Expr::parse("-x^2")(3.0) == doctest::Approx(-9.0));    // ^ binds tighter
  CHECK(Expr::parse("2 + 0.1*sin(x)")(0.5) == doctest::Approx(2.0 + 0.1 * std::sin(0.5)));
  CHECK(Expr::parse("pi")(0.0) == doctest::Approx(M_PI));
  CHECK(Expr::parse("max(x, 2)")(3.0) == doctest::Approx(3.0));
  CHECK(Expr::parse("min(x, 2)")(3.0) == doctest::Approx(2.0));
  CHECK(Expr::parse("pow(x, 3)")(2.0) == doctest::Approx(8.0));
  CHECK(Expr::parse("abs(-x)")(2.5) == doctest::Approx(2.5));
  CHECK(Expr::parse(" 1 + x ")(1.0) == doctest::Approx(2.0));  // whitespace-insensitive
}

TEST_CASE("multi-variable bindings") {
  Expr e = Expr::parse("exp(-(z-x)^2)");
  Bindings b;
  b.set(Var::x, 1.0).set(Var::z, 2.5);
  CHECK(e.eval(b) == doctest::Approx(std::exp(-2.25)));
  CHECK(e.depends_on(Var::x));
  CHECK(e.depends_on(Var::z));
  CHECK(!e.depends_on(Var::y));
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(Expr::parse("1+"), ParseError);
  CHECK_THROWS_AS(Expr::parse("(1+2"), ParseError);
  CHECK_THROWS_AS(Expr::parse("foo(1)"), ParseError);
  CHECK_THROWS_AS(Expr::parse("sin(1,2)"), ParseError);
  CHECK_THROWS_AS(Expr::parse("max(1)"), ParseError);
  CHECK_THROWS_AS(Expr::parse("1 @ 2"), ParseError);
  try {
    Expr::parse("1+2*q");
  } catch (const ParseError& pe) {
    CHECK(pe.position == 4);
  }
}

TEST_CASE("eval errors") {
  CHECK_THROWS_AS(Expr::parse("y")(1.0), EvalError);  // unbound
  CHECK_THROWS_AS(Expr::parse("log(x-2)")(1.0), EvalError);
  CHECK_THROWS_AS(Expr::parse("sqrt(-1+x)")(0.0), EvalError);
  CHECK_THROWS_AS(Expr::parse("1/(x-1)")(1.0), EvalError);
  CHECK_THROWS_AS(Expr::parse("exp(x)")(1e6), EvalError);  // overflow, not inf
}

TEST_CASE("symbolic derivative closed forms") {
  CHECK(Expr::parse("x^2").differentiate(Var::x)(3.0) == doctest::Approx(6.0));
  CHECK(Expr::parse("sin(x)").differentiate(Var::x)(0.0) == doctest::Approx(1.0));
  CHECK(Expr::parse("2+sin(x)").differentiate(Var::x)(1.2) == doctest::Approx(std::cos(1.2)));
  // Second derivative through the algebra.
  Expr a = Expr::parse("1+0.1*sin(x)");
  CHECK(a.differentiate(Var::x).differentiate(Var::x)(0.7) ==
        doctest::Approx(-0.1 * std::sin(0.7)));
  // x^x via the general power rule.
  Expr g = Expr::parse("x^x");
  CHECK(g.differentiate(Var::x)(2.0) == doctest::Approx(4.0 * (std::log(2.0) + 1.0)));
  // Partial derivatives keep other variables symbolic.
  Expr n = Expr::parse("exp(-(z-x)^2)");
  Bindings b;
  b.set(Var::x, 0.3).set(Var::z, 1.1);
  CHECK(n.differentiate(Var::z).eval(b) ==
        doctest::Approx(-2.0 * (1.1 - 0.3) * std::exp(-0.64)));
}

TEST_CASE("kink conventions") {
  CHECK(Expr::parse("abs(x)").differentiate(Var::x)(0.0) == doctest::Approx(0.0));
  CHECK(Expr::parse("abs(x)").differentiate(Var::x)(2.0) == doctest::Approx(1.0));
  CHECK(Expr::parse("abs(x)").differentiate(Var::x)(-2.0) == doctest::Approx(-1.0));
  // Ties pick the first argument.
  CHECK(Expr::parse("max(2*x, x)").differentiate(Var::x)(0.0) == doctest::Approx(2.0));
  CHECK(Expr::parse("min(2*x, x)").differentiate(Var::x)(0.0) == doctest::Approx(2.0));
}

TEST_CASE("derivative matches central finite differences on random smooth expressions") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> xs(-2.0, 2.0);
  const double h = 1e-5;
  int checked = 0;
  while (checked < 200) {
    std::string s = random_smooth(rng, 4);
    Expr e = Expr::parse(s);
    Expr d = e.differentiate(Var::x);
    double x = xs(rng);
    double fd = (e(x + h) - e(x - h)) / (2.0 * h);
    double sym = d(x);
    CHECK(std::fabs(sym - fd) <= 1e-6 * (1.0 + std::fabs(sym)));
    ++checked;
  }
}

TEST_CASE("serialization round trip") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> xs(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    std::string s = random_smooth(rng, 4);
    Expr e = Expr::parse(s);
    Expr e2 = Expr::parse(e.serialize());
    double x = xs(rng);
    CHECK(e2(x) == doctest::Approx(e(x)).epsilon(1e-14));
  }
}

TEST_CASE("parser totality under fuzzing") {
  std::mt19937_64 rng(4242);
  const std::string alphabet = "xyzt0123456789.+-*/^() ,sincoexplgqrabmXN\\\"'%#";
  std::uniform_int_distribution<std::size_t> len(0, 40);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  int parsed = 0, rejected = 0;
  for (int i = 0; i < 1000; ++i) {
    std::string s;
    std::size_t l = len(rng);
    for (std::size_t j = 0; j < l; ++j) s += alphabet[pick(rng)];
    try {
      Expr e = Expr::parse(s);
      ++parsed;
      try {
        (void)e(0.5);
      } catch (const EvalError&) {
      }
    } catch (const ParseError&) {
      ++rejected;
    }
  }
  CHECK(parsed + rejected == 1000);
  CHECK(rejected > 0);  // sanity: fuzz actually produced garbage
}
