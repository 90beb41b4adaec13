#include "kdual/fractional.hpp"

#include <cmath>

namespace kdual {

namespace {

double pos_pow(double s, double p) { return s > 0.0 ? std::pow(s, p) : 0.0; }

void check_beta_one_sided(double beta) {
  // Orders above 2 appear when differentiating higher-order duality kernels;
  // the binomial weights stay valid there.
  if (!(beta > 0.0 && beta < 4.0))
    throw InputError("fractional order out of range (0,4)");
}

// |d/dx| for the symmetric beta=1 case: cell-integrated Cauchy jump weights,
// principal value realized by the symmetric diagonal compensation.
Matrix cauchy_derivative_matrix(const Grid& grid) {
  const std::size_t n = grid.n;
  const double h = grid.h();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double d = std::fabs(grid.node(j) - grid.node(i));
      double w = (1.0 / (d - 0.5 * h) - 1.0 / (d + 0.5 * h)) / M_PI;
      m(i, j) = -w;
      diag += w;
    }
    m(i, i) = diag;
  }
  return m;
}

Matrix one_sided_derivative(double beta, Side side, const Grid& grid,
                            DerivTarget target) {
  if (target == DerivTarget::generator) {
    int shift = beta > 1.0 ? 1 : 0;
    return gl_matrix(beta, side, grid, shift);
  }
  double s_eff = target == DerivTarget::compose ? 0.5 * (beta - 1.0) : 0.5 * beta;
  int s0 = static_cast<int>(std::floor(s_eff));
  double lam = s_eff - static_cast<double>(s0);
  Matrix m = gl_matrix(beta, side, grid, s0);
  m *= (1.0 - lam);
  if (lam > 0.0) {
    Matrix m1 = gl_matrix(beta, side, grid, s0 + 1);
    m1 *= lam;
    m += m1;
  }
  return m;
}

}  // namespace

Grid Grid::uniform(double x_min, double x_max, std::size_t n) {
  if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max))
    throw InputError("grid bounds must be finite with x_min < x_max");
  if (n < 8) throw InputError("grid needs at least 8 nodes");
  return Grid{x_min, x_max, n};
}

Vector Grid::nodes() const {
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = node(i);
  return v;
}

std::size_t Grid::index_of(double v) const {
  double r = std::round((v - x_min) / h());
  if (r < 0.0) return 0;
  if (r > static_cast<double>(n - 1)) return n - 1;
  return static_cast<std::size_t>(r);
}

Vector gl_weights(double beta, std::size_t count) {
  Vector g(count);
  if (count == 0) return g;
  g[0] = 1.0;
  for (std::size_t m = 1; m < count; ++m)
    g[m] = g[m - 1] * (static_cast<double>(m) - 1.0 - beta) / static_cast<double>(m);
  return g;
}

Matrix gl_matrix(double beta, Side side, const Grid& grid, int shift) {
  if (side == Side::symmetric)
    throw InputError("gl_matrix takes a one-sided direction");
  check_beta_one_sided(beta);
  const std::size_t n = grid.n;
  const double scale = std::pow(grid.h(), -beta);
  Vector g = gl_weights(beta, n + 3);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t mm = 0; mm < g.size(); ++mm) {
      long j = side == Side::plus
                   ? static_cast<long>(i) - static_cast<long>(mm) + shift
                   : static_cast<long>(i) + static_cast<long>(mm) - shift;
      if (j >= 0 && j < static_cast<long>(n))
        m(i, static_cast<std::size_t>(j)) += g[mm] * scale;
    }
  }
  return m;
}

Matrix frac_derivative_matrix(const FracOrder& order, const Grid& grid,
                              DerivTarget target) {
  const double beta = order.beta;
  if (order.side == Side::symmetric) {
    if (!(beta > 0.0 && beta <= 2.0))
      throw InputError("symmetric fractional order out of range (0,2]");
    if (beta == 1.0) return cauchy_derivative_matrix(grid);
    // (iu)^b + (-iu)^b = 2|u|^b cos(pi b/2), so the modulus derivative is the
    // two-sided sum over that constant.
    double c = 1.0 / (2.0 * std::cos(0.5 * M_PI * beta));
    Matrix m = one_sided_derivative(beta, Side::plus, grid, target);
    m += one_sided_derivative(beta, Side::minus, grid, target);
    m *= c;
    return m;
  }
  check_beta_one_sided(beta);
  return one_sided_derivative(beta, order.side, grid, target);
}

GridFn frac_derivative(const FracOrder& order, const GridFn& f, DerivTarget target) {
  if (f.kind != FnKind::point_values)
    throw InputError("frac_derivative expects point values");
  Matrix m = frac_derivative_matrix(order, f.grid, target);
  return GridFn{f.grid, FnKind::point_values, m * f.v};
}

Matrix frac_integral_matrix(double k, Side side, const Grid& grid) {
  if (!(k > 0.0)) throw InputError("fractional integral order must be positive");
  if (side == Side::symmetric)
    throw InputError("fractional integral takes a one-sided direction");
  const std::size_t n = grid.n;
  const double h = grid.h();
  const double gk1 = std::tgamma(k + 1.0);
  Matrix m(n, n);
  // Exact integration of the kernel against a piecewise-constant density:
  // plus-side cells are [x_j, x_j + h), minus-side cells (x_j - h, x_j].
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // Offsets from index differences so the triangular zeros are exact.
      long d = side == Side::plus ? static_cast<long>(j) - static_cast<long>(i)
                                  : static_cast<long>(i) - static_cast<long>(j);
      double s = h * static_cast<double>(d);
      m(i, j) = (pos_pow(s + h, k) - pos_pow(s, k)) / gk1;
    }
  }
  return m;
}

GridFn frac_integral(const FracOrder& order, const GridFn& q) {
  if (q.kind != FnKind::cell_density)
    throw InputError("frac_integral expects a cell density");
  if (order.side == Side::symmetric)
    throw InputError("fractional integral takes a one-sided direction");
  Matrix m = frac_integral_matrix(order.beta, order.side, q.grid);
  return GridFn{q.grid, FnKind::point_values, m * q.v};
}

Matrix build_f_matrix(double k, const Grid& grid) {
  if (!(k > 0.0)) throw InputError("duality order must be positive");
  if (k <= 2.0) return frac_integral_matrix(k, Side::plus, grid);
  // A single product-integration factor of order > 2 has symbol zeros inside
  // the unit disk and its inverse blows up exponentially; compose instead.
  return frac_integral_matrix(2.0, Side::plus, grid) * build_f_matrix(k - 2.0, grid);
}

GridFn fundamental_solution(double beta, double gamma, double sigma, const Grid& grid) {
  if (!(beta > 0.0 && beta < 2.0) || beta == 1.0)
    throw InputError("fundamental solution needs beta in (0,1) or (1,2)");
  double bound = beta < 1.0 ? beta : 2.0 - beta;
  if (std::fabs(gamma) > bound + 1e-12)
    throw InputError("skewness out of range for this stability index");
  if (!(sigma != 0.0) || !std::isfinite(sigma))
    throw InputError("scale must be finite and nonzero");
  const double g1b = std::tgamma(1.0 - beta);
  const double cp = -g1b * std::sin(0.5 * M_PI * (beta + gamma)) / (sigma * M_PI);
  const double cm = -g1b * std::sin(0.5 * M_PI * (beta - gamma)) / (sigma * M_PI);
  const std::size_t n = grid.n;
  const double h = grid.h();
  // Cell averages over [x_i, x_i + h): the antiderivative of
  // cp*x_+^{b-1} + cm*x_-^{b-1} is (cp*x_+^b - cm*x_-^b)/b.
  auto anti = [&](double s) {
    return (cp * pos_pow(s, beta) - cm * pos_pow(-s, beta)) / beta;
  };
  GridFn f{grid, FnKind::cell_density, Vector(n)};
  for (std::size_t i = 0; i < n; ++i) {
    double xi = grid.node(i);
    f.v[i] = (anti(xi + h) - anti(xi)) / h;
  }
  return f;
}

double integration_by_parts_residual(const GridFn& phi_plus, const GridFn& phi_minus,
                                     double k) {
  if (!phi_plus.grid.same_as(phi_minus.grid))
    throw InputError("integration by parts needs a shared grid");
  const Grid& grid = phi_plus.grid;
  const double h = grid.h();
  int shift = k > 1.0 ? 1 : 0;
  Matrix dp = gl_matrix(k, Side::plus, grid, shift);
  Matrix dm = gl_matrix(k, Side::minus, grid, shift);
  Vector a = dp * phi_minus.v;
  Vector b = dm * phi_plus.v;
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    lhs += phi_plus.v[i] * a[i];
    rhs += phi_minus.v[i] * b[i];
  }
  return std::fabs(h * (lhs - rhs));
}

Matrix second_diff_matrix(const Grid& grid) {
  const std::size_t n = grid.n;
  const double ih2 = 1.0 / (grid.h() * grid.h());
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) m(i, i - 1) += ih2;
    m(i, i) -= 2.0 * ih2;
    if (i + 1 < n) m(i, i + 1) += ih2;
  }
  return m;
}

Matrix first_diff_matrix(const Grid& grid) {
  const std::size_t n = grid.n;
  const double h = grid.h();
  Matrix m(n, n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    m(i, i - 1) = -0.5 / h;
    m(i, i + 1) = 0.5 / h;
  }
  m(0, 0) = -1.0 / h;
  m(0, 1) = 1.0 / h;
  m(n - 1, n - 2) = -1.0 / h;
  m(n - 1, n - 1) = 1.0 / h;
  return m;
}

}  // namespace kdual
