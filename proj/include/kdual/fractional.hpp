#pragma once

#include <cstddef>

#include "kdual/errors.hpp"
#include "kdual/matrix.hpp"

namespace kdual {

struct Grid {
  double x_min = 0.0;
  double x_max = 1.0;
  std::size_t n = 8;

  static Grid uniform(double x_min, double x_max, std::size_t n);

  double h() const { return (x_max - x_min) / static_cast<double>(n - 1); }
  double node(std::size_t i) const { return x_min + h() * static_cast<double>(i); }
  Vector nodes() const;
  // Index of the node closest to v.
  std::size_t index_of(double v) const;
  bool same_as(const Grid& o) const {
    return x_min == o.x_min && x_max == o.x_max && n == o.n;
  }
};

enum class Side { plus, minus, symmetric };

struct FracOrder {
  double beta;
  Side side;
};

enum class FnKind { point_values, cell_density };

struct GridFn {
  Grid grid;
  FnKind kind = FnKind::point_values;
  Vector v;
};

// Grunwald-Letnikov binomial weights (-1)^m binom(beta, m), m = 0..count-1.
Vector gl_weights(double beta, std::size_t count);

// One-sided GL derivative matrix with an integer node shift; zero extension
// beyond the grid.
Matrix gl_matrix(double beta, Side side, const Grid& grid, int shift);

// What the derivative matrix is meant for:
//   generator - pure shifted GL (shift 1 for beta in (1,2), else 0); the
//               conditionally positive rows a Markov generator needs.
//   compose   - two-point GL mixture with effective shift (beta-1)/2; inverts
//               the product-integration integral to higher order.
//   point     - mixture with effective shift beta/2; best pointwise accuracy.
enum class DerivTarget { generator, compose, point };

Matrix frac_derivative_matrix(const FracOrder& order, const Grid& grid,
                              DerivTarget target);

GridFn frac_derivative(const FracOrder& order, const GridFn& f,
                       DerivTarget target = DerivTarget::point);

// Product-integration matrix of the kernel (x-y)_+^{k-1}/Gamma(k): exact on
// piecewise-constant cell densities, triangular with diagonal h^k/Gamma(k+1).
Matrix frac_integral_matrix(double k, Side side, const Grid& grid);

GridFn frac_integral(const FracOrder& order, const GridFn& q);

// Kernel matrix used for order-k duality. Single product integration for
// k <= 2; composed factors for k > 2 (a single factor is exponentially
// ill-conditioned to invert there).
Matrix build_f_matrix(double k, const Grid& grid);

// Fundamental solution of the one-dimensional stable symbol with stability
// beta, skewness gamma and scale sigma, represented by cell averages.
GridFn fundamental_solution(double beta, double gamma, double sigma, const Grid& grid);

double integration_by_parts_residual(const GridFn& phi_plus, const GridFn& phi_minus,
                                     double k);

// Classical difference matrices (zero extension outside the grid for the
// second difference; one-sided stencils at the ends of the first).
Matrix second_diff_matrix(const Grid& grid);
Matrix first_diff_matrix(const Grid& grid);

}  // namespace kdual
