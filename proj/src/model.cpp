#include "kdual/model.hpp"

#include <cmath>

namespace kdual {

namespace {

Vector eval_on_grid(const Expr& e, const Grid& grid, double t, bool time_dependent) {
  Vector v(grid.n, 0.0);
  if (e.empty()) return v;
  for (std::size_t i = 0; i < grid.n; ++i) {
    Bindings b = Bindings::at_x(grid.node(i));
    if (time_dependent) b.set(Var::t, t);
    v[i] = e.eval(b);
  }
  return v;
}

double eval_nu(const Expr& nu, double x, double z, double t, bool time_dependent) {
  Bindings b;
  b.set(Var::x, x).set(Var::z, z);
  if (time_dependent) b.set(Var::t, t);
  double v = nu.eval(b);
  if (v < 0.0) throw InputError("jump density must be nonnegative on the grid");
  return v;
}

}  // namespace

JumpSpec JumpSpec::density(Expr nu, bool compensated) {
  JumpSpec j;
  j.kind = Kind::density;
  j.nu = std::move(nu);
  j.compensated = compensated;
  return j;
}

JumpSpec JumpSpec::stable_like(double beta, Side side, Expr scale) {
  if (!(beta > 0.0 && beta <= 2.0))
    throw InputError("stable index must lie in (0,2]");
  if (side == Side::symmetric)
    throw InputError("stable_like takes a one-sided direction");
  JumpSpec j;
  j.kind = Kind::stable_like;
  j.beta = beta;
  j.side = side;
  j.scale = std::move(scale);
  return j;
}

JumpSpec JumpSpec::symmetric_stable(double beta, Expr scale) {
  if (!(beta > 0.0 && beta <= 2.0))
    throw InputError("stable index must lie in (0,2]");
  JumpSpec j;
  j.kind = Kind::symmetric_stable;
  j.beta = beta;
  j.side = Side::symmetric;
  j.scale = std::move(scale);
  return j;
}

GeneratorMatrix discretize(const GeneratorSpec& spec, const Grid& grid, double t) {
  const std::size_t n = grid.n;
  const double h = grid.h();
  Matrix m(n, n);

  Vector a = eval_on_grid(spec.a, grid, t, spec.time_dependent);
  Vector b = eval_on_grid(spec.b, grid, t, spec.time_dependent);
  for (double v : a)
    if (v < 0.0) throw InputError("diffusion coefficient must be nonnegative");

  const double ih2 = 1.0 / (h * h);
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] != 0.0) {
      if (i > 0) m(i, i - 1) += a[i] * ih2;
      m(i, i) -= 2.0 * a[i] * ih2;
      if (i + 1 < n) m(i, i + 1) += a[i] * ih2;
    }
    if (b[i] != 0.0) {
      if (i == 0) {
        m(0, 0) -= b[i] / h;
        m(0, 1) += b[i] / h;
      } else if (i + 1 == n) {
        m(i, i - 1) -= b[i] / h;
        m(i, i) += b[i] / h;
      } else if (a[i] * ih2 >= std::fabs(b[i]) * 0.5 / h) {
        // Central stencil keeps both neighbors nonnegative.
        m(i, i - 1) -= 0.5 * b[i] / h;
        m(i, i + 1) += 0.5 * b[i] / h;
      } else if (b[i] > 0.0) {  // upwind
        m(i, i) -= b[i] / h;
        m(i, i + 1) += b[i] / h;
      } else {
        m(i, i) += b[i] / h;
        m(i, i - 1) -= b[i] / h;
      }
    }
  }

  bool conservative = true;
  switch (spec.jump.kind) {
    case JumpSpec::Kind::none:
      break;
    case JumpSpec::Kind::density: {
      Vector comp(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        double x = grid.node(i);
        double row_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          double w = h * eval_nu(spec.jump.nu, x, grid.node(j), t, spec.time_dependent);
          m(i, j) += w;
          row_sum += w;
          comp[i] += w * (grid.node(j) - x);
        }
        m(i, i) -= row_sum;
      }
      if (spec.jump.compensated) {
        // Remove the jump-mean drift so only the compensated integral remains.
        for (std::size_t i = 1; i + 1 < n; ++i) {
          m(i, i - 1) += 0.5 * comp[i] / h;
          m(i, i + 1) -= 0.5 * comp[i] / h;
        }
        m(0, 0) += comp[0] / h;
        m(0, 1) -= comp[0] / h;
        m(n - 1, n - 2) += comp[n - 1] / h;
        m(n - 1, n - 1) -= comp[n - 1] / h;
      }
      break;
    }
    case JumpSpec::Kind::stable_like: {
      Vector s = eval_on_grid(spec.jump.scale, grid, t, spec.time_dependent);
      for (double v : s)
        if (v < 0.0) throw InputError("stable-like scale must be nonnegative");
      double sign = spec.jump.beta > 1.0 ? 1.0 : -1.0;
      Matrix d = frac_derivative_matrix(FracOrder{spec.jump.beta, spec.jump.side},
                                        grid, DerivTarget::generator);
      for (std::size_t i = 0; i < n; ++i)
        kernels::axpy(sign * s[i], d.row(i), m.row(i), n);
      // One-sided truncation loses tail mass toward the upwind boundary; the
      // rows are left sub-conservative on purpose.
      conservative = false;
      break;
    }
    case JumpSpec::Kind::symmetric_stable: {
      Vector s = eval_on_grid(spec.jump.scale, grid, t, spec.time_dependent);
      for (double v : s)
        if (v < 0.0) throw InputError("stable scale must be nonnegative");
      Matrix d = frac_derivative_matrix(FracOrder{spec.jump.beta, Side::symmetric},
                                        grid, DerivTarget::generator);
      for (std::size_t i = 0; i < n; ++i)
        kernels::axpy(-s[i], d.row(i), m.row(i), n);
      // Reassign the truncated symmetric tail mass to the diagonal. Boundary
      // rows keep plain zero-extension semantics.
      for (std::size_t i = 1; i + 1 < n; ++i) {
        double rs = 0.0;
        for (std::size_t j = 0; j < n; ++j) rs += m(i, j);
        m(i, i) -= rs;
      }
      break;
    }
  }

  return GeneratorMatrix{grid, std::move(m), conservative};
}

GridFn martingale_residual(const GeneratorSpec& spec, const Grid& grid) {
  const std::size_t n = grid.n;
  const double h = grid.h();
  GridFn r{grid, FnKind::point_values, Vector(n, 0.0)};
  Vector b = eval_on_grid(spec.b, grid, 0.0, spec.time_dependent);
  for (std::size_t i = 0; i < n; ++i) r.v[i] = b[i];
  if (spec.jump.kind == JumpSpec::Kind::density && !spec.jump.compensated) {
    for (std::size_t i = 0; i < n; ++i) {
      double x = grid.node(i);
      // Symmetric window realizes the principal-value reading of the mean.
      std::size_t half = std::min(i, n - 1 - i);
      double mean = 0.0;
      for (std::size_t j = i - half; j <= i + half; ++j)
        mean += h * (grid.node(j) - x) *
                eval_nu(spec.jump.nu, x, grid.node(j), 0.0, spec.time_dependent);
      r.v[i] += mean;
    }
  }
  return r;
}

double conditional_positivity_violation(const GeneratorMatrix& gm) {
  const std::size_t n = gm.grid.n;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && gm.m(i, j) < worst) worst = gm.m(i, j);
  return -worst;
}

double conservativity_violation(const GeneratorMatrix& gm) {
  const std::size_t n = gm.grid.n;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += gm.m(i, j);
    worst = std::max(worst, std::fabs(s));
  }
  return worst;
}

}  // namespace kdual
