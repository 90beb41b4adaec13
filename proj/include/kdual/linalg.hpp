#pragma once

#include "kdual/matrix.hpp"

namespace kdual {

// LU factorization with partial pivoting.
class LuFactor {
 public:
  explicit LuFactor(Matrix a);

  Vector solve(Vector b) const;
  // Solves A X = B column-wise.
  Matrix solve(const Matrix& b) const;
  Matrix inverse() const;

 private:
  Matrix lu_;
  std::vector<std::size_t> piv_;
};

// Solves U x = b for upper-triangular U (strictly positive diagonal assumed).
Vector solve_upper(const Matrix& u, Vector b);
Matrix solve_upper(const Matrix& u, const Matrix& b);

// exp(A) by Pade scaling and squaring (degree-13 approximant).
Matrix expm(const Matrix& a);

// exp(A) approximated by composed implicit Euler steps (I - A/steps)^{-steps}.
// First-order fallback for stiff or large problems.
Matrix expm_implicit_euler(const Matrix& a, std::size_t steps);

}  // namespace kdual
