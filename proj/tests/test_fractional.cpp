#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kdual/fractional.hpp"

using namespace kdual;

namespace {

GridFn sample_points(const Grid& g, double (*f)(double)) {
  GridFn r{g, FnKind::point_values, Vector(g.n)};
  for (std::size_t i = 0; i < g.n; ++i) r.v[i] = f(g.node(i));
  return r;
}

GridFn sample_density(const Grid& g, double (*f)(double)) {
  GridFn r{g, FnKind::cell_density, Vector(g.n)};
  for (std::size_t i = 0; i < g.n; ++i) r.v[i] = f(g.node(i));
  return r;
}

double bump(double x) { return std::exp(-x * x); }

}  // namespace

TEST_CASE("grid validation and node lookup") {
  CHECK_THROWS_AS(Grid::uniform(1.0, 0.0, 100), InputError);
  CHECK_THROWS_AS(Grid::uniform(0.0, 1.0, 4), InputError);
  Grid g = Grid::uniform(-10.0, 10.0, 201);
  CHECK(g.h() == doctest::Approx(0.1));
  CHECK(g.node(100) == doctest::Approx(0.0));
  CHECK(g.index_of(0.04) == 100);
  CHECK(g.index_of(-1e9) == 0);
  CHECK(g.index_of(1e9) == 200);
}

TEST_CASE("GL weights reduce to classical stencils at integer orders") {
  Vector g1 = gl_weights(1.0, 5);
  CHECK(g1[0] == doctest::Approx(1.0));
  CHECK(g1[1] == doctest::Approx(-1.0));
  CHECK(g1[2] == doctest::Approx(0.0));
  Vector g2 = gl_weights(2.0, 5);
  CHECK(g2[0] == doctest::Approx(1.0));
  CHECK(g2[1] == doctest::Approx(-2.0));
  CHECK(g2[2] == doctest::Approx(1.0));
  CHECK(g2[3] == doctest::Approx(0.0));
  // Weights of fractional order sum toward zero (binomial series at 1).
  Vector gh = gl_weights(0.5, 4000);
  double s = 0.0;
  for (double w : gh) s += w;
  CHECK(std::fabs(s) < 1e-2);
  CHECK(gh[1] == doctest::Approx(-0.5));
}

TEST_CASE("one-sided GL transpose pairs the two directions exactly") {
  Grid g = Grid::uniform(-2.0, 2.0, 33);
  for (double beta : {0.5, 1.5}) {
    int shift = beta > 1.0 ? 1 : 0;
    Matrix dp = gl_matrix(beta, Side::plus, g, shift);
    Matrix dm = gl_matrix(beta, Side::minus, g, shift);
    CHECK((dp.transpose() - dm).max_abs() == 0.0);
  }
}

TEST_CASE("product integration is exact on aligned piecewise-constant densities") {
  Grid g = Grid::uniform(-4.0, 4.0, 161);  // h = 0.05, cell edges hit 0 and 1
  const double k = 1.5;
  GridFn q{g, FnKind::cell_density, Vector(g.n, 0.0)};
  for (std::size_t j = 0; j < g.n; ++j)
    if (g.node(j) >= -1e-12 && g.node(j) < 1.0 - 1e-12) q.v[j] = 1.0;
  GridFn phi = frac_integral(FracOrder{k, Side::plus}, q);
  const double gk1 = std::tgamma(k + 1.0);
  for (std::size_t i = 0; i < g.n; ++i) {
    double x = g.node(i);
    if (x > -1e-9) continue;
    double exact = (std::pow(1.0 - x, k) - std::pow(-x, k)) / gk1;
    CHECK(phi.v[i] == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("integral matrices are triangular with the closed-form diagonal") {
  Grid g = Grid::uniform(-3.0, 3.0, 41);
  for (double k : {0.5, 1.0, 1.7}) {
    Matrix wp = frac_integral_matrix(k, Side::plus, g);
    Matrix wm = frac_integral_matrix(k, Side::minus, g);
    double diag = std::pow(g.h(), k) / std::tgamma(k + 1.0);
    for (std::size_t i = 0; i < g.n; ++i) {
      CHECK(wp(i, i) == doctest::Approx(diag).epsilon(1e-12));
      CHECK(wm(i, i) == doctest::Approx(diag).epsilon(1e-12));
      for (std::size_t j = 0; j < i; ++j) {
        CHECK(wp(i, j) == 0.0);
        CHECK(wm(j, i) == 0.0);
      }
    }
  }
}

TEST_CASE("derivative inverts integral with increasing accuracy") {
  for (double beta : {0.5, 1.5}) {
    double prev = -1.0;
    for (std::size_t n : {257u, 513u, 1025u}) {
      Grid g = Grid::uniform(-8.0, 8.0, n);
      GridFn q = sample_density(g, bump);
      GridFn phi = frac_integral(FracOrder{beta, Side::plus}, q);
      phi.kind = FnKind::point_values;
      // The right-collecting integral is inverted by the right-looking
      // derivative direction.
      GridFn back = frac_derivative(FracOrder{beta, Side::minus}, phi, DerivTarget::compose);
      double err = 0.0;
      std::size_t margin = n / 8;
      for (std::size_t i = margin; i < n - margin; ++i)
        err = std::max(err, std::fabs(back.v[i] - q.v[i]));
      if (prev > 0.0) CHECK(err < prev / 1.5);
      prev = err;
    }
    CHECK(prev < 2e-3);
  }
}

TEST_CASE("translation equivariance on interior nodes") {
  Grid g = Grid::uniform(-6.0, 6.0, 241);
  const double beta = 0.7;
  Matrix d = frac_derivative_matrix(FracOrder{beta, Side::plus}, g, DerivTarget::point);
  GridFn f = sample_points(g, bump);
  GridFn fs{g, FnKind::point_values, Vector(g.n, 0.0)};
  for (std::size_t i = 1; i < g.n; ++i) fs.v[i] = f.v[i - 1];
  Vector df = d * f.v;
  Vector dfs = d * fs.v;
  for (std::size_t i = g.n / 4; i < 3 * g.n / 4; ++i)
    CHECK(dfs[i] == doctest::Approx(df[i - 1]).epsilon(1e-10));
}

TEST_CASE("symmetric derivative: beta=2 is the negated second difference") {
  Grid g = Grid::uniform(-5.0, 5.0, 101);
  Matrix d = frac_derivative_matrix(FracOrder{2.0, Side::symmetric}, g,
                                    DerivTarget::generator);
  Matrix ref = second_diff_matrix(g);
  CHECK((d + ref).max_abs() < 1e-10);
}

TEST_CASE("symmetric derivative commutes with reflection") {
  Grid g = Grid::uniform(-5.0, 5.0, 129);
  const std::size_t n = g.n;
  Matrix d = frac_derivative_matrix(FracOrder{1.3, Side::symmetric}, g,
                                    DerivTarget::generator);
  GridFn f = sample_points(g, bump);
  Vector df = d * f.v;
  // Even input on a symmetric grid must give an even output.
  for (std::size_t i = 0; i < n; ++i)
    CHECK(df[i] == doctest::Approx(df[n - 1 - i]).epsilon(1e-9));
}

TEST_CASE("Cauchy modulus derivative matches the Poisson kernel identity") {
  // |d/dx| applied to 1/(1+x^2) equals (1-x^2)/(1+x^2)^2.
  Grid g = Grid::uniform(-60.0, 60.0, 2401);
  Matrix d = frac_derivative_matrix(FracOrder{1.0, Side::symmetric}, g,
                                    DerivTarget::generator);
  GridFn f{g, FnKind::point_values, Vector(g.n)};
  for (std::size_t i = 0; i < g.n; ++i) {
    double x = g.node(i);
    f.v[i] = 1.0 / (1.0 + x * x);
  }
  Vector df = d * f.v;
  for (double x0 : {0.0, 0.5, 1.0, 2.0}) {
    std::size_t i = g.index_of(x0);
    double x = g.node(i);
    double exact = (1.0 - x * x) / ((1.0 + x * x) * (1.0 + x * x));
    CHECK(df[i] == doctest::Approx(exact).epsilon(0.0).scale(1.0).epsilon(0.02));
  }
}

TEST_CASE("fundamental solution: fully skewed case reduces to the power kernel") {
  // gamma = beta, sigma = -1 gives cell averages of x_+^{beta-1}/Gamma(beta).
  const double beta = 0.5;
  Grid g = Grid::uniform(-4.0, 4.0, 201);
  GridFn f = fundamental_solution(beta, beta, -1.0, g);
  CHECK(f.kind == FnKind::cell_density);
  const double h = g.h();
  for (std::size_t i = 0; i < g.n; ++i) {
    double x = g.node(i);
    double cell = (std::pow(std::max(x + h, 0.0), beta) -
                   std::pow(std::max(x, 0.0), beta)) /
                  (std::tgamma(beta + 1.0) * h);
    CHECK(f.v[i] == doctest::Approx(cell).epsilon(1e-10));
  }
  // Symmetric case is even.
  GridFn s = fundamental_solution(1.5, 0.0, 1.0, Grid::uniform(-4.0, 4.0, 161));
  for (std::size_t i = 1; i + 1 < s.grid.n; ++i) {
    // Cells [x, x+h) mirror to cells indexed from the other end shifted by one.
    CHECK(s.v[i] == doctest::Approx(s.v[s.grid.n - 1 - i - 1] + 0.0).epsilon(1e-9));
  }
}

TEST_CASE("fundamental solution parameter validation") {
  Grid g = Grid::uniform(-1.0, 1.0, 33);
  CHECK_THROWS_AS(fundamental_solution(1.0, 0.0, 1.0, g), InputError);
  CHECK_THROWS_AS(fundamental_solution(0.5, 0.9, 1.0, g), InputError);
  CHECK_THROWS_AS(fundamental_solution(1.5, 1.0, 1.0, g), InputError);
  CHECK_NOTHROW(fundamental_solution(1.5, 0.4, 1.0, g));
}

TEST_CASE("integration by parts residual") {
  Grid g = Grid::uniform(-8.0, 8.0, 1025);
  const double k = 1.5;
  GridFn qp = sample_density(g, bump);
  GridFn qm = sample_density(g, bump);
  GridFn phip = frac_integral(FracOrder{k, Side::plus}, qp);
  GridFn phim = frac_integral(FracOrder{k, Side::minus}, qm);
  double norm = 0.0;
  for (double v : qp.v) norm = std::max(norm, std::fabs(v));
  double res = integration_by_parts_residual(phip, phim, k);
  CHECK(res < 1e-6 * norm * norm);

  GridFn zero{g, FnKind::point_values, Vector(g.n, 0.0)};
  CHECK(integration_by_parts_residual(zero, zero, k) == 0.0);
}

TEST_CASE("f matrix composition for k > 2 stays triangular") {
  Grid g = Grid::uniform(-5.0, 5.0, 65);
  Matrix f = build_f_matrix(2.5, g);
  for (std::size_t i = 0; i < g.n; ++i) {
    CHECK(f(i, i) > 0.0);
    for (std::size_t j = 0; j < i; ++j) CHECK(f(i, j) == 0.0);
  }
}

TEST_CASE("kind tags are enforced") {
  Grid g = Grid::uniform(-1.0, 1.0, 16);
  GridFn pts{g, FnKind::point_values, Vector(g.n, 1.0)};
  GridFn den{g, FnKind::cell_density, Vector(g.n, 1.0)};
  CHECK_THROWS_AS(frac_integral(FracOrder{1.0, Side::plus}, pts), InputError);
  CHECK_THROWS_AS(frac_derivative(FracOrder{0.5, Side::plus}, den), InputError);
  CHECK_THROWS_AS(frac_integral(FracOrder{-1.0, Side::plus}, den), InputError);
  CHECK_THROWS_AS(frac_derivative(FracOrder{4.5, Side::plus}, pts), InputError);
}
