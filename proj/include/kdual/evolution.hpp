#pragma once

#include "kdual/duality.hpp"

namespace kdual {

enum class ExpMethod { pade, implicit_euler };

// Transition matrix exp(t*L). Pade scaling-and-squaring by default; implicit
// Euler composition as the stiff/large-n fallback (steps = 0 picks
// ceil(t*norm1(L))). t = 0 returns the identity exactly.
Matrix transition(const GeneratorMatrix& l, double t,
                  ExpMethod method = ExpMethod::pade, std::size_t steps = 0);

// Gap between exp(t*L^D) and F * exp(t*L)^T * F^{-1} -- the semigroup form of
// the duality relation, exact up to rounding because conjugation commutes with
// the matrix exponential, independent of discretization quality. Reported in
// max-norm relative to the componentwise scale max |F| |exp(t*L)^T| |F^{-1}|
// at which the conjugation commits its rounding; for well-conditioned F this
// is just the relative gap.
double dual_semigroup_check(const GeneratorMatrix& l, const FOperator& f, double t);

// Backward propagator of a time-dependent generator family, realized as a
// time-ordered product of per-step exponentials with the generator sampled at
// step midpoints. Step boundaries sit on a fixed lattice of width dt so that
// subinterval products compose exactly (the chain rule holds to rounding);
// requested times snap to the nearest lattice point.
class Propagator {
 public:
  Propagator(GeneratorSpec spec, const Grid& grid, double horizon, double dt);

  const Grid& grid() const { return grid_; }
  double horizon() const { return horizon_; }
  double dt() const { return dt_; }

  GeneratorMatrix generator_at(double t) const;
  Matrix evolve(double s, double t) const;

 private:
  GeneratorSpec spec_;
  Grid grid_;
  double horizon_;
  double dt_;
};

// Time-reversed conjugated family U^D(s,t) = F * U(T-t, T-s)^T * F^{-1} with
// T the horizon of the underlying propagator.
class DualPropagator {
 public:
  DualPropagator(Propagator p, FOperator f);

  const Propagator& base() const { return p_; }
  const FOperator& f() const { return f_; }

  Matrix evolve(double s, double t) const;
  // Generator of the dual family at time s: F * A(T-s)^T * F^{-1}.
  Matrix generator_at(double s) const;
  // max-norm of U^D(s,t)*F - F*U(T-t,T-s)^T: the on-grid pairing identity.
  double pairing_residual(double s, double t) const;

 private:
  Propagator p_;
  FOperator f_;
};

}  // namespace kdual
