#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kdual/options.hpp"

using namespace kdual;

TEST_CASE("payoff values and conventions") {
  Payoff call = Payoff::powered_call(2.0, 1.0);
  CHECK(call(3.0) == 2.0);
  CHECK(call(0.5) == 0.0);
  Payoff put = Payoff::powered_put(2.0, 1.0);
  CHECK(put(0.5) == 0.5);
  CHECK(put(3.0) == 0.0);

  // Digitals are right-continuous at the strike: theta(0) = 1 on both sides.
  CHECK(Payoff::digital_call(1.0)(1.0) == 1.0);
  CHECK(Payoff::digital_put(1.0)(1.0) == 1.0);
  CHECK(Payoff::digital_call(1.0)(0.9) == 0.0);
  CHECK(Payoff::digital_put(1.0)(1.1) == 0.0);

  Payoff st = Payoff::straddle(1.5, 0.0);
  CHECK(st(4.0) == doctest::Approx(2.0));
  CHECK(st(-4.0) == doctest::Approx(2.0));
  CHECK(st(0.0) == 0.0);
  CHECK(Payoff::straddle(1.0, 0.0)(0.0) == 1.0);
}

TEST_CASE("spread equals a difference of shifted calls exactly") {
  Payoff spread = Payoff::bull_put_spread(-0.5, 0.5, 1.0);
  Payoff hi = Payoff::powered_call(2.0, 1.0 - (-0.5));
  Payoff lo = Payoff::powered_call(2.0, 1.0 - 0.5);
  for (double s = -3.0; s <= 3.0; s += 0.1) CHECK(spread(s) == hi(s) - lo(s));
}

TEST_CASE("payoff validation") {
  CHECK_THROWS_AS(Payoff::powered_call(0.0, 1.0), InputError);
  CHECK_THROWS_AS(Payoff::straddle(-1.0, 0.0), InputError);
  CHECK_THROWS_AS(Payoff::bull_put_spread(0.5, 0.5, 0.0), InputError);
  CHECK_THROWS_AS(Payoff::bull_put_spread(1.0, 0.5, 0.0), InputError);
}

TEST_CASE("grid price at t=0 is the payoff itself") {
  Grid g = Grid::uniform(-10.0, 10.0, 100);
  GeneratorSpec spec = GeneratorSpec::diffusion(Expr::parse("1"), Expr());
  Payoff call = Payoff::powered_call(2.0, 0.3);
  CHECK(price_grid(spec, g, call, 0.0, 1.2345) == call(1.2345));
  CHECK_THROWS_AS(price_grid(spec, g, call, 0.0, 9.5), SpotOutsideWindow);
  CHECK_THROWS_AS(price_grid(spec, g, call, 0.0, -9.5), SpotOutsideWindow);
  CHECK_THROWS_AS(price_grid(spec, g, call, 0.0, 0.0, 0.7), InputError);
}

TEST_CASE("standard normal call and digital prices") {
  // a = 1/2 gives the N(0,1) terminal law at t = 1: the at-the-money call of
  // order 2 is worth E Z_+ = 1/sqrt(2 pi) and the digital 1/2.
  Grid g = Grid::uniform(-10.0, 10.0, 400);
  GeneratorSpec spec = GeneratorSpec::diffusion(Expr::parse("0.5"), Expr());
  double call = price_grid(spec, g, Payoff::powered_call(2.0, 0.0), 1.0, 0.0);
  CHECK(std::fabs(call - 1.0 / std::sqrt(2.0 * M_PI)) < 1e-2);
  // The digital payoff is discontinuous, so the node quadrature carries
  // half a cell of mass at the strike: O(h) accuracy, not O(h^2).
  double dig = price_grid(spec, g, Payoff::digital_call(0.0), 1.0, 0.0);
  CHECK(std::fabs(dig - 0.5) < 2e-2);
}

TEST_CASE("call price is nonincreasing in the strike") {
  Grid g = Grid::uniform(-10.0, 10.0, 200);
  GeneratorSpec spec = GeneratorSpec::diffusion(Expr::parse("0.5"), Expr::parse("0.1"));
  double prev = -1.0;
  for (double strike = 2.0; strike >= -2.0; strike -= 0.5) {
    double price = price_grid(spec, g, Payoff::powered_call(2.0, strike), 0.5, 0.0);
    if (prev >= 0.0) CHECK(price >= prev - 1e-12);
    prev = price;
  }
  // Digital prices stay inside [0, 1] up to rounding.
  for (double strike : {-1.0, 0.0, 1.0}) {
    double d = price_grid(spec, g, Payoff::digital_call(strike), 0.5, 0.0);
    CHECK(d > -1e-6);
    CHECK(d < 1.0 + 1e-6);
  }
}

TEST_CASE("put-call symmetry on the grid: self-dual Brownian case") {
  Grid g = Grid::uniform(-10.0, 10.0, 400);
  GeneratorSpec spec = GeneratorSpec::diffusion(Expr::parse("0.5"), Expr());
  SymmetryReport rep = putcall_symmetry_report(spec, 2.0, {-1.0, 0.0, 1.0},
                                               {-1.0, 0.0, 1.0}, 1.0,
                                               PriceMethod::grid, g, 1e-3);
  CHECK(rep.rows.size() == 9);
  CHECK(rep.all_pass);
  for (const SymmetryRow& r : rep.rows) CHECK(r.abs_gap < 1e-3);
  CHECK(rep.method == "grid");
}

TEST_CASE("put-call symmetry on the grid: drifted case needs the true dual") {
  Grid g = Grid::uniform(-10.0, 10.0, 400);
  GeneratorSpec spec = GeneratorSpec::diffusion(Expr::parse("0.5"), Expr::parse("0.3"));
  SymmetryReport rep = putcall_symmetry_report(spec, 2.0, {0.5, 1.0}, {-0.5, 0.0}, 1.0,
                                               PriceMethod::grid, g, 1e-3);
  CHECK(rep.all_pass);
}

TEST_CASE("order-1 symmetry reproduces the distribution-function relation") {
  // k = 1: the call side is P(X_t^x >= y), the put side P(Y_t^y <= x).
  Grid g = Grid::uniform(-10.0, 10.0, 400);
  GeneratorSpec spec = GeneratorSpec::diffusion(Expr::parse("1"), Expr::parse("0.3"));
  SymmetryReport rep = putcall_symmetry_report(spec, 1.0, {-0.7, 0.0, 0.7},
                                               {-0.7, 0.0, 0.7}, 0.5,
                                               PriceMethod::grid, g, 1e-2);
  CHECK(rep.all_pass);
  // Sanity: at x = y = 0 both sides are near-median probabilities.
  for (const SymmetryRow& r : rep.rows)
    if (r.x == 0.0 && r.y == 0.0) CHECK(r.lhs == doctest::Approx(0.5).epsilon(0.3));
}

TEST_CASE("put-call symmetry for a one-sided stable-like generator") {
  Grid g = Grid::uniform(-20.0, 20.0, 400);
  GeneratorSpec spec{Expr(), Expr(),
                     JumpSpec::stable_like(1.5, Side::plus, Expr::parse("2+sin(x)")),
                     false};
  SymmetryReport rep = putcall_symmetry_report(spec, 1.5, {-1.0, 0.0, 1.0},
                                               {-1.0, 0.0, 1.0}, 0.5,
                                               PriceMethod::grid, g, 1e-2);
  CHECK(rep.all_pass);
}

TEST_CASE("put-call symmetry by simulation") {
  GeneratorSpec spec = GeneratorSpec::diffusion(Expr::parse("0.5"), Expr::parse("0.3"));
  Grid g = Grid::uniform(-10.0, 10.0, 201);
  PathConfig cfg{1e-2, 20000, 19, Scheme::euler};
  SymmetryReport rep = putcall_symmetry_report(spec, 2.0, {1.0}, {0.0}, 1.0,
                                               PriceMethod::mc, g, 1e-3, cfg);
  CHECK(rep.rows.size() == 1);
  CHECK(rep.all_pass);
  CHECK(rep.method == "mc");

  GeneratorSpec jumpy{Expr(), Expr(), JumpSpec::symmetric_stable(1.5, Expr::parse("1")), false};
  CHECK_THROWS_AS(putcall_symmetry_report(jumpy, 2.0, {1.0}, {0.0}, 1.0,
                                          PriceMethod::mc, g, 1e-3, cfg),
                  InputError);
}

TEST_CASE("straddle self-symmetry") {
  Grid g = Grid::uniform(-20.0, 20.0, 400);
  GeneratorSpec spec{Expr(), Expr(), JumpSpec::symmetric_stable(1.5, Expr::parse("2+sin(x)")),
                     false};
  std::vector<std::pair<double, double>> pairs;
  for (double x : {-M_PI, 0.0, M_PI})
    for (double y : {-M_PI, 0.0, M_PI}) pairs.emplace_back(x, y);
  SymmetryReport rep = straddle_selfsymmetry_report(spec, 1.5, pairs, 0.5, g, 1e-2);
  CHECK(rep.rows.size() == 9);
  CHECK(rep.all_pass);
  for (const SymmetryRow& r : rep.rows)
    if (r.x == r.y) CHECK(r.abs_gap == 0.0);  // both sides identical rows

  // Levy case: translation invariance forces the symmetry for any pair.
  GeneratorSpec levy{Expr(), Expr(), JumpSpec::symmetric_stable(1.5, Expr::parse("1")), false};
  SymmetryReport flat = straddle_selfsymmetry_report(levy, 1.5, {{0.7, -0.4}}, 0.5, g, 1e-2);
  CHECK(flat.all_pass);

  // The order must match the stable index, and the generator must be purely
  // symmetric stable-like.
  CHECK_THROWS_AS(straddle_selfsymmetry_report(spec, 1.4, pairs, 0.5, g), InputError);
  GeneratorSpec diff = GeneratorSpec::diffusion(Expr::parse("1"), Expr());
  CHECK_THROWS_AS(straddle_selfsymmetry_report(diff, 2.0, pairs, 0.5, g), InputError);
}

TEST_CASE("spread symmetry for a periodic diffusion coefficient") {
  Grid g = Grid::uniform(-10.0, 10.0, 400);
  GeneratorSpec spec = GeneratorSpec::diffusion(Expr::parse("2+cos(2*3.14159265358979324*x)"),
                                                Expr());
  std::vector<std::pair<double, double>> pairs = {{-0.5, 0.25}, {0.0, 0.0}, {0.75, -0.25}};
  SymmetryReport rep = spread_symmetry_report(spec, -0.5, 0.5, pairs, 0.5, g, 1e-2);
  CHECK(!rep.warning);
  CHECK(rep.all_pass);

  // Constant coefficient is periodic for every width.
  GeneratorSpec flat = GeneratorSpec::diffusion(Expr::parse("1"), Expr());
  SymmetryReport frep = spread_symmetry_report(flat, -0.3, 0.7, pairs, 0.5, g, 1e-2);
  CHECK(!frep.warning);
  CHECK(frep.all_pass);

  // Non-periodic coefficient: warning raised, rows informational.
  GeneratorSpec quad = GeneratorSpec::diffusion(Expr::parse("2+x^2"), Expr());
  SymmetryReport wrep = spread_symmetry_report(quad, -0.5, 0.5, pairs, 0.5, g, 1e-2);
  CHECK(wrep.warning);
  CHECK(wrep.all_pass);  // nothing asserted
  CHECK(!wrep.note.empty());

  CHECK_THROWS_AS(spread_symmetry_report(spec, 0.5, -0.5, pairs, 0.5, g), InputError);
}

TEST_CASE("report CSV serialization") {
  SymmetryReport rep;
  rep.method = "grid";
  SymmetryRow r;
  r.x = 1.0;
  r.y = -0.5;
  r.lhs = 0.123456789012345;
  r.rhs = 0.123456789;
  r.abs_gap = 1.2345e-11;
  r.rel_gap = 1e-10;
  r.pass = true;
  rep.rows.push_back(r);
  std::string csv = to_csv(rep);
  CHECK(csv.substr(0, 44) == "x,y,lhs,rhs,abs_gap,rel_gap,method,pass\n1,-0");
  CHECK(csv.find("grid,1\n") != std::string::npos);
  CHECK(csv.find("0.123456789012") != std::string::npos);
  CHECK(csv.back() == '\n');
}
