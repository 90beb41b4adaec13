#include "kdual/linalg.hpp"

#include <cmath>
#include <cstddef>

#include "kdual/errors.hpp"
#include "kdual/kernels.hpp"

namespace kdual {

LuFactor::LuFactor(Matrix a) : lu_(std::move(a)), piv_(lu_.rows()) {
  const std::size_t n = lu_.rows();
  if (lu_.cols() != n) throw NumericError("LU: matrix not square");
  for (std::size_t i = 0; i < n; ++i) piv_[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::fabs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      double v = std::fabs(lu_(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best == 0.0) throw NumericError("LU: singular matrix");
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
      std::swap(piv_[k], piv_[p]);
    }
    const double pivot = lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = lu_(i, k) / pivot;
      lu_(i, k) = m;
      if (m != 0.0) kernels::axpy(-m, lu_.row(k) + k + 1, lu_.row(i) + k + 1, n - k - 1);
    }
  }
}

Vector LuFactor::solve(Vector b) const {
  const std::size_t n = lu_.rows();
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[piv_[i]];
  for (std::size_t i = 1; i < n; ++i)
    x[i] -= kernels::dot(lu_.row(i), x.data(), i);
  for (std::size_t ii = n; ii-- > 0;) {
    x[ii] -= kernels::dot(lu_.row(ii) + ii + 1, x.data() + ii + 1, n - ii - 1);
    x[ii] /= lu_(ii, ii);
  }
  return x;
}

Matrix LuFactor::solve(const Matrix& b) const {
  const std::size_t n = lu_.rows();
  const std::size_t m = b.cols();
  // Work column-block-wise on the transpose so rows are contiguous.
  Matrix bt = b.transpose();  // m x n
  Matrix xt(m, n);
  for (std::size_t c = 0; c < m; ++c) {
    Vector col(bt.row(c), bt.row(c) + n);
    Vector x = solve(std::move(col));
    for (std::size_t i = 0; i < n; ++i) xt(c, i) = x[i];
  }
  return xt.transpose();
}

Matrix LuFactor::inverse() const { return solve(Matrix::identity(lu_.rows())); }

Vector solve_upper(const Matrix& u, Vector b) {
  const std::size_t n = u.rows();
  for (std::size_t ii = n; ii-- > 0;) {
    b[ii] -= kernels::dot(u.row(ii) + ii + 1, b.data() + ii + 1, n - ii - 1);
    const double d = u(ii, ii);
    if (d == 0.0) throw NumericError("triangular solve: zero diagonal");
    b[ii] /= d;
  }
  return b;
}

Matrix solve_upper(const Matrix& u, const Matrix& b) {
  const std::size_t n = u.rows();
  Matrix bt = b.transpose();
  Matrix xt(bt.rows(), n);
  for (std::size_t c = 0; c < bt.rows(); ++c) {
    Vector col(bt.row(c), bt.row(c) + n);
    Vector x = solve_upper(u, std::move(col));
    for (std::size_t i = 0; i < n; ++i) xt(c, i) = x[i];
  }
  return xt.transpose();
}

Matrix expm(const Matrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw NumericError("expm: matrix not square");
  static const double b[] = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  const double theta13 = 5.371920351148152;

  double nrm = a.norm1();
  int squarings = 0;
  Matrix as = a;
  if (nrm > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    as *= std::ldexp(1.0, -squarings);
  }

  Matrix a2 = as * as;
  Matrix a4 = a2 * a2;
  Matrix a6 = a2 * a4;
  Matrix id = Matrix::identity(n);

  Matrix w1 = b[13] * a6 + b[11] * a4 + b[9] * a2;
  Matrix w2 = b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  Matrix u = as * (a6 * w1 + w2);
  Matrix z1 = b[12] * a6 + b[10] * a4 + b[8] * a2;
  Matrix v = a6 * z1 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

  Matrix r = LuFactor(v - u).solve(v + u);
  for (int s = 0; s < squarings; ++s) r = r * r;
  return r;
}

Matrix expm_implicit_euler(const Matrix& a, std::size_t steps) {
  if (steps == 0) throw NumericError("expm_implicit_euler: zero steps");
  const std::size_t n = a.rows();
  Matrix step = Matrix::identity(n) - a * (1.0 / static_cast<double>(steps));
  Matrix inv;
  try {
    inv = LuFactor(std::move(step)).inverse();
  } catch (const NumericError&) {
    throw NumericError("expm_implicit_euler: step too large, implicit solve failed");
  }
  Matrix r = Matrix::identity(n);
  Matrix p = inv;
  std::size_t e = steps;
  // Exponentiation by squaring of the per-step resolvent.
  while (e > 0) {
    if (e & 1u) r = r * p;
    e >>= 1u;
    if (e > 0) p = p * p;
  }
  return r;
}

}  // namespace kdual
