#include "kdual/duality.hpp"

#include <cmath>

#include "kdual/kernels.hpp"

namespace kdual {

namespace {

Expr or_zero(const Expr& e) { return e.empty() ? Expr::constant(0.0) : e; }

Vector sample(const Expr& e, const Grid& grid) {
  Vector v(grid.n, 0.0);
  if (e.empty()) return v;
  for (std::size_t i = 0; i < grid.n; ++i) v[i] = e.eval(Bindings::at_x(grid.node(i)));
  return v;
}

double eval_nu(const Expr& nu, double x, double z) {
  Bindings b;
  b.set(Var::x, x).set(Var::z, z);
  double v = nu.eval(b);
  if (v < 0.0) throw InputError("jump density must be nonnegative on the grid");
  return v;
}

// Order-k z-derivative matrix used row-wise on sampled kernels, plus the width
// of the boundary band whose columns the stencil contaminates.
Matrix deriv_matrix(double k, const Grid& grid, std::size_t* band) {
  if (k == 1.0) {
    *band = 1;
    return first_diff_matrix(grid);
  }
  if (k == 2.0) {
    *band = 1;
    return second_diff_matrix(grid);
  }
  *band = 2;
  return frac_derivative_matrix(FracOrder{k, Side::plus}, grid, DerivTarget::point);
}

void zero_band(Vector& row, std::size_t band) {
  const std::size_t n = row.size();
  for (std::size_t j = 0; j < band && j < n; ++j) {
    row[j] = 0.0;
    row[n - 1 - j] = 0.0;
  }
}

}  // namespace

FOperator::FOperator(double k, const Grid& grid) : k_(k), grid_(grid) {
  if (!(k > 0.0)) throw InputError("duality order must be positive");
  f_ = build_f_matrix(k, grid);
  finv_ = solve_upper(f_, Matrix::identity(grid.n));
}

FOperator build_f_operator(double k, const Grid& grid) { return FOperator(k, grid); }

Matrix FOperator::conjugate(const Matrix& l) const {
  Matrix flt = f_ * l.transpose();
  Matrix ld = flt * finv_;
  // One refinement step: ld += (F L^T - ld F) F^{-1}.
  Matrix r = flt;
  r -= ld * f_;
  ld += r * finv_;
  return ld;
}

Matrix FOperator::unconjugate(const Matrix& ld) const {
  return (finv_ * ld * f_).transpose();
}

double FOperator::intertwining_residual(const Matrix& l, const Matrix& ld) const {
  Matrix r = ld * f_;
  r -= f_ * l.transpose();
  return r.max_abs();
}

GeneratorMatrix dual_matrix(const GeneratorMatrix& l, const FOperator& f) {
  if (!l.grid.same_as(f.grid()))
    throw InputError("generator and duality operator live on different grids");
  // Duals are sub-Markov in general; no conservativity claim survives.
  return GeneratorMatrix{l.grid, f.conjugate(l.m), false};
}

DualGeneratorResult dual_diffusion_analytic(const Expr& a, const Expr& b, double k,
                                            const Grid& grid) {
  if (!(k >= 1.0)) throw InputError("diffusion dual needs order k >= 1");
  const std::size_t n = grid.n;
  const double h = grid.h();

  Expr ax = or_zero(a);
  Expr bx = or_zero(b);
  Expr ap = ax.differentiate(Var::x);
  Expr app = ap.differentiate(Var::x);
  Expr bp = bx.differentiate(Var::x);

  DualGeneratorResult res{GeneratorMatrix{grid, Matrix(n, n), false}, true,
                          ax,
                          -(bx + Expr::constant(k - 2.0) * ap),
                          Matrix(n, n),
                          {}};

  Vector av = sample(ax, grid), apv = sample(ap, grid), appv = sample(app, grid);
  Vector bv = sample(bx, grid), bpv = sample(bp, grid);

  Matrix& m = res.matrix.m;
  const double ih2 = 1.0 / (h * h);
  for (std::size_t i = 0; i < n; ++i) {
    double bd = -(bv[i] + (k - 2.0) * apv[i]);
    if (i > 0) m(i, i - 1) += av[i] * ih2;
    m(i, i) -= 2.0 * av[i] * ih2;
    if (i + 1 < n) m(i, i + 1) += av[i] * ih2;
    if (i == 0) {
      m(0, 0) -= bd / h;
      m(0, 1) += bd / h;
    } else if (i + 1 == n) {
      m(i, i - 1) -= bd / h;
      m(i, i) += bd / h;
    } else {
      m(i, i - 1) -= 0.5 * bd / h;
      m(i, i + 1) += 0.5 * bd / h;
    }
  }

  if (k != 1.0) {
    std::size_t band = 0;
    Matrix dx = deriv_matrix(k, grid, &band);
    const double gk1 = std::tgamma(k - 1.0);
    const double gk2 = (k != 2.0) ? std::tgamma(k - 2.0) : 1.0;
    double worst = 0.0, largest = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double y = grid.node(i);
      Vector phi(n, 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        double s = grid.node(j) - y;
        if (s <= 0.0) continue;
        double db = bv[j] - bv[i] - bpv[i] * s;
        if (k == 2.0) {
          phi[j] = db;
        } else {
          double da = av[j] - av[i] - apv[i] * s - 0.5 * appv[i] * s * s;
          phi[j] = db * std::pow(s, k - 2.0) / gk1 + da * std::pow(s, k - 3.0) / gk2;
        }
      }
      Vector row = dx * phi;
      zero_band(row, band);
      double rs = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        res.jump_dual(i, j) = row[j];
        m(i, j) += h * row[j];
        rs += row[j];
        if (i >= n / 10 && i < n - n / 10 && j >= n / 10 && j < n - n / 10) {
          worst = std::min(worst, row[j]);
          largest = std::max(largest, std::fabs(row[j]));
        }
      }
      m(i, i) -= h * rs;
    }
    res.diagnostics.monotone_ok = worst >= -0.05 * std::max(largest, 1e-300);

    // Limit condition at the right edge of a grid enlarged by half its width:
    // the order-(k-1) derivative of the compensated increments must approach
    // -(k-1)b'(y) - (k-1)(k-2)a''(y)/2.
    std::size_t ext = (n - 1) / 2;
    Grid egrid = Grid::uniform(grid.x_min, grid.x_max + h * static_cast<double>(ext),
                               n + ext);
    std::size_t iy = n / 2;
    double y = grid.node(iy);
    Vector ea = sample(ax, egrid), eb = sample(bx, egrid);
    Vector phi(egrid.n, 0.0);
    for (std::size_t j = 0; j < egrid.n; ++j) {
      double s = egrid.node(j) - y;
      if (s <= 0.0) continue;
      double db = eb[j] - bv[iy] - bpv[iy] * s;
      if (k == 2.0) {
        phi[j] = db;
      } else {
        double da = ea[j] - av[iy] - apv[iy] * s - 0.5 * appv[iy] * s * s;
        phi[j] = db * std::pow(s, k - 2.0) / gk1 + da * std::pow(s, k - 3.0) / gk2;
      }
    }
    Matrix dkm1 = (k == 2.0) ? first_diff_matrix(egrid)
                             : frac_derivative_matrix(FracOrder{k - 1.0, Side::plus},
                                                      egrid, DerivTarget::point);
    Vector dphi = dkm1 * phi;
    double edge = dphi[egrid.n - 3];
    double target = -(k - 1.0) * bpv[iy] - 0.5 * (k - 1.0) * (k - 2.0) * appv[iy];
    res.diagnostics.limit_condition_residual = std::fabs(edge - target);
    res.diagnostics.sub_markov = edge < target - 1e-8 * (1.0 + std::fabs(target));
  }

  return res;
}

DualGeneratorResult dual_jump_analytic(const Expr& nu, double k, const Grid& grid) {
  if (!(k > 0.0)) throw InputError("duality order must be positive");
  const std::size_t n = grid.n;
  const double h = grid.h();

  DualGeneratorResult res{GeneratorMatrix{grid, Matrix(n, n), false}, true,
                          Expr(), Expr(), Matrix(n, n), {}};
  if (nu.empty()) return res;

  Matrix nuv(n, n);  // nu(x_j, w_l) sampled; rows are the first argument
  Vector total(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t l = 0; l < n; ++l) nuv(j, l) = eval_nu(nu, grid.node(j), grid.node(l));
    for (std::size_t l = 0; l < n; ++l) total[j] += h * nuv(j, l);
  }

  // Compensated kernel before the z-derivative:
  //   phi(y,z) = int w_kernel(y,w) nu(z,w) dw + cell(y,z) (total(y) - total(z)),
  // where w_kernel is the order-k product-integration row and cell its density.
  Matrix wk = frac_integral_matrix(k, Side::plus, grid);
  Matrix phi = wk * nuv.transpose();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      phi(i, j) += wk(i, j) / h * (total[i] - total[j]);

  std::size_t band = 0;
  Matrix dz = deriv_matrix(k, grid, &band);
  Matrix nd = phi * dz.transpose();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < band; ++j) {
      nd(i, j) = 0.0;
      nd(i, n - 1 - j) = 0.0;
    }
  }

  Matrix& m = res.matrix.m;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = h * nd(i, j);
    // Diagonal from the generator's explicit -g(y) * total rate term; the
    // truncated w-quadrature near the edges makes a row-sum form diverge.
    m(i, i) = h * nd(i, i) - total[i];
  }
  res.jump_dual = nd;

  // Diagnostics on the interior window: the dual density must be nonnegative
  // (kernel monotonicity) and its mass must balance the exit rate (boundary
  // conditions; equality Markov, deficit sub-Markov).
  const std::size_t mgn = n / 10;
  double worst = 0.0, largest = 0.0, imbalance = 0.0, deficit = 0.0, rate = 1e-300;
  for (std::size_t i = mgn; i < n - mgn; ++i) {
    double rs = 0.0;
    for (std::size_t j = 0; j < n; ++j) rs += h * nd(i, j);
    imbalance = std::max(imbalance, std::fabs(rs - total[i]));
    deficit = std::min(deficit, rs - total[i]);
    rate = std::max(rate, total[i]);
    for (std::size_t j = mgn; j < n - mgn; ++j) {
      worst = std::min(worst, nd(i, j));
      largest = std::max(largest, std::fabs(nd(i, j)));
    }
  }
  res.diagnostics.monotone_ok = worst >= -0.05 * std::max(largest, 1e-300);
  res.diagnostics.limit_condition_residual = imbalance / rate;
  res.diagnostics.sub_markov = deficit < -0.05 * rate;
  return res;
}

MonotoneReport check_monotone_order_k(const GeneratorMatrix& l, double k, double t,
                                      double tol, double window_fraction) {
  if (!(k >= 1.0)) throw InputError("monotonicity check needs order k >= 1");
  if (!(t > 0.0)) throw InputError("monotonicity check needs a positive time");
  if (!(window_fraction >= 0.0 && window_fraction < 0.5))
    throw InputError("window fraction must lie in [0, 0.5)");
  const Grid& grid = l.grid;
  const std::size_t n = grid.n;

  Matrix p = expm(l.m * t);

  // g(x_i, y_j) = sum_z (x_z - y_j)_+^{k-1} P_t(x_i, z); theta(0) = 1 keeps the
  // k=1 kernel right-continuous.
  Matrix g(n, n);
  Matrix pw(n, n);
  for (std::size_t z = 0; z < n; ++z)
    for (std::size_t j = 0; j < n; ++j) {
      double s = grid.node(z) - grid.node(j);
      pw(z, j) = s > 0.0 ? std::pow(s, k - 1.0) : (s == 0.0 && k == 1.0 ? 1.0 : 0.0);
    }
  g = p * pw;

  MonotoneReport rep;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      rep.scale = std::max(rep.scale, std::fabs(g(i, j)));
  rep.tol = tol < 0.0 ? 1e-6 * rep.scale : tol;

  std::size_t band = 0;
  Matrix dx = deriv_matrix(k, grid, &band);
  Matrix dg = dx * g;
  const std::size_t mgn = static_cast<std::size_t>(window_fraction * static_cast<double>(n));
  double worst = 0.0;
  for (std::size_t i = mgn; i < n - mgn; ++i)
    for (std::size_t j = mgn; j < n - mgn; ++j) worst = std::min(worst, dg(i, j));
  rep.min_derivative = worst;
  rep.monotone = worst >= -rep.tol;

  // Edge values of the order-(k-1) derivative of g scaled by 1/Gamma(k),
  // at the window edges in x for the central y.
  Vector gy(n);
  std::size_t jy = n / 2;
  for (std::size_t i = 0; i < n; ++i) gy[i] = g(i, jy);
  Vector e = gy;
  if (k != 1.0) {
    Matrix dkm1 = (k == 2.0) ? first_diff_matrix(grid)
                             : frac_derivative_matrix(FracOrder{k - 1.0, Side::plus},
                                                      grid, DerivTarget::point);
    e = dkm1 * gy;
  }
  const double gk = std::tgamma(k);
  rep.edge_high = e[n - 1 - mgn] / gk;
  rep.edge_low = e[mgn] / gk;
  return rep;
}

double check_self_dual(const Expr& nu, int order, const Grid& grid) {
  if (order != 1 && order != 2) throw InputError("self-duality order must be 1 or 2");
  const std::size_t n = grid.n;
  const double h = grid.h();
  auto ev = [&](double p, double q) {
    Bindings b;
    b.set(Var::x, p).set(Var::z, q);
    return nu.eval(b);
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double y = grid.node(i);
    for (std::size_t j = 0; j < n; ++j) {
      double z = grid.node(j);
      double lhs, rhs;
      if (order == 1) {
        lhs = (ev(y + h, z) - ev(y - h, z)) / (2.0 * h);
        rhs = (ev(z, y + h) - ev(z, y - h)) / (2.0 * h);
      } else {
        lhs = (ev(y + h, z) - 2.0 * ev(y, z) + ev(y - h, z)) / (h * h);
        rhs = (ev(z, y + h) - 2.0 * ev(z, y) + ev(z, y - h)) / (h * h);
      }
      worst = std::max(worst, std::fabs(lhs - rhs));
    }
  }
  return worst;
}

}  // namespace kdual
