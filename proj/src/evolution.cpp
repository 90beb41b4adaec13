#include "kdual/evolution.hpp"

#include <cmath>

namespace kdual {

Matrix transition(const GeneratorMatrix& l, double t, ExpMethod method,
                  std::size_t steps) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("time must be finite and >= 0");
  if (t == 0.0) return Matrix::identity(l.grid.n);
  Matrix a = l.m * t;
  if (method == ExpMethod::pade) return expm(a);
  if (steps == 0) steps = static_cast<std::size_t>(std::ceil(t * l.m.norm1())) + 1;
  return expm_implicit_euler(a, steps);
}

namespace {

Matrix elementwise_abs(Matrix m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = std::fabs(m(i, j));
  return m;
}

}  // namespace

double dual_semigroup_check(const GeneratorMatrix& l, const FOperator& f, double t) {
  GeneratorMatrix ld = dual_matrix(l, f);
  Matrix u = transition(l, t);
  Matrix lhs = transition(ld, t);
  Matrix rhs = f.conjugate(u);
  lhs -= rhs;
  // At high order the conjugation forms products whose entries dwarf the
  // result, and rounding is committed at that intermediate scale; an absolute
  // gap would measure nothing but that amplification. Normalize by the
  // componentwise backward-error scale max |F| |U^T| |F^{-1}|, which reduces
  // to the plain relative gap when F is well conditioned.
  Matrix finv = solve_upper(f.matrix(), Matrix::identity(l.grid.n));
  double scale = (elementwise_abs(f.matrix()) * elementwise_abs(u.transpose()) *
                  elementwise_abs(std::move(finv)))
                     .max_abs();
  return lhs.max_abs() / scale;
}

Propagator::Propagator(GeneratorSpec spec, const Grid& grid, double horizon, double dt)
    : spec_(std::move(spec)), grid_(grid), horizon_(horizon), dt_(dt) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw InputError("propagator horizon must be finite and positive");
  if (!(dt > 0.0) || dt > horizon)
    throw InputError("propagator step must lie in (0, horizon]");
}

GeneratorMatrix Propagator::generator_at(double t) const {
  return discretize(spec_, grid_, t);
}

Matrix Propagator::evolve(double s, double t) const {
  if (!(s >= -1e-12) || !(t >= s) || t > horizon_ + 1e-12)
    throw InputError("evolution interval must satisfy 0 <= s <= t <= horizon");
  long j0 = std::lround(s / dt_);
  long j1 = std::lround(t / dt_);
  Matrix u = Matrix::identity(grid_.n);
  for (long j = j0; j < j1; ++j) {
    double mid = (static_cast<double>(j) + 0.5) * dt_;
    u = u * expm(discretize(spec_, grid_, mid).m * dt_);
  }
  return u;
}

DualPropagator::DualPropagator(Propagator p, FOperator f)
    : p_(std::move(p)), f_(std::move(f)) {
  if (!p_.grid().same_as(f_.grid()))
    throw InputError("propagator and duality operator live on different grids");
}

Matrix DualPropagator::evolve(double s, double t) const {
  double T = p_.horizon();
  return f_.conjugate(p_.evolve(T - t, T - s));
}

Matrix DualPropagator::generator_at(double s) const {
  return f_.conjugate(p_.generator_at(p_.horizon() - s).m);
}

double DualPropagator::pairing_residual(double s, double t) const {
  double T = p_.horizon();
  Matrix u = p_.evolve(T - t, T - s);
  Matrix r = evolve(s, t) * f_.matrix();
  r -= f_.matrix() * u.transpose();
  return r.max_abs();
}

}  // namespace kdual
