#pragma once

#include "kdual/expr.hpp"
#include "kdual/fractional.hpp"
#include "kdual/matrix.hpp"

namespace kdual {

struct JumpSpec {
  enum class Kind { none, density, stable_like, symmetric_stable };

  Kind kind = Kind::none;
  Expr nu;                  // density(x, z), Kind::density
  bool compensated = false; // density given in compensated (martingale) form
  double beta = 0.0;        // stable kinds
  Side side = Side::plus;   // stable_like direction
  Expr scale;               // multiplier a(x) for stable kinds

  static JumpSpec none() { return {}; }
  static JumpSpec density(Expr nu, bool compensated = false);
  static JumpSpec stable_like(double beta, Side side, Expr scale);
  static JumpSpec symmetric_stable(double beta, Expr scale);
};

struct GeneratorSpec {
  Expr a;  // diffusion coefficient (empty means 0); generator is a*d^2/dx^2
  Expr b;  // drift (empty means 0)
  JumpSpec jump;
  bool time_dependent = false;  // coefficients may reference t

  static GeneratorSpec diffusion(Expr a, Expr b) {
    return GeneratorSpec{std::move(a), std::move(b), JumpSpec::none(), false};
  }
};

struct GeneratorMatrix {
  Grid grid;
  Matrix m;
  // True when interior rows are built to sum to zero (Markov, not sub-Markov).
  bool conservative_interior = false;
};

GeneratorMatrix discretize(const GeneratorSpec& spec, const Grid& grid, double t = 0.0);

// Per-node drift-vs-jump-mean imbalance; zero for martingale generators. The
// jump mean is taken as a symmetric principal value around each node.
GridFn martingale_residual(const GeneratorSpec& spec, const Grid& grid);

// Worst negative interior off-diagonal entry (0 when conditionally positive).
double conditional_positivity_violation(const GeneratorMatrix& gm);
// Worst absolute interior row sum.
double conservativity_violation(const GeneratorMatrix& gm);

}  // namespace kdual
