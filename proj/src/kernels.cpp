#include "kdual/kernels.hpp"

#include <cstring>
#include <vector>

#if defined(__x86_64__) || defined(_M_X64)
#define KDUAL_X86 1
#include <immintrin.h>
#elif defined(__aarch64__)
#define KDUAL_NEON 1
#include <arm_neon.h>
#endif

namespace kdual::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

#ifdef KDUAL_X86

__attribute__((target("avx2,fma")))
double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  acc0 = _mm256_add_pd(acc0, acc1);
  double lane[4];
  _mm256_storeu_pd(lane, acc0);
  double s = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

__attribute__((target("avx2,fma")))
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4),
                                                _mm256_loadu_pd(y + i + 4)));
  }
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

bool cpu_has_avx2() { return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"); }

#endif  // KDUAL_X86

#ifdef KDUAL_NEON

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(acc0) + vaddvq_f64(acc1);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    vst1q_f64(y + i + 2, vfmaq_f64(vld1q_f64(y + i + 2), va, vld1q_f64(x + i + 2)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

#endif  // KDUAL_NEON

struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  Isa isa;
};

Table pick_best() {
#ifdef KDUAL_X86
  if (cpu_has_avx2()) return {dot_avx2, axpy_avx2, Isa::avx2};
#endif
#ifdef KDUAL_NEON
  return {dot_neon, axpy_neon, Isa::neon};
#endif
  return {dot_scalar, axpy_scalar, Isa::scalar};
}

Table& table() {
  static Table t = pick_best();
  return t;
}

}  // namespace

Isa active() { return table().isa; }

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#ifdef KDUAL_X86
      return cpu_has_avx2();
#else
      return false;
#endif
    case Isa::neon:
#ifdef KDUAL_NEON
      return true;
#else
      return false;
#endif
  }
  return false;
}

bool force(Isa isa) {
  if (!supported(isa)) return false;
  switch (isa) {
    case Isa::scalar:
      table() = {dot_scalar, axpy_scalar, Isa::scalar};
      return true;
    case Isa::avx2:
#ifdef KDUAL_X86
      table() = {dot_avx2, axpy_avx2, Isa::avx2};
      return true;
#else
      return false;
#endif
    case Isa::neon:
#ifdef KDUAL_NEON
      table() = {dot_neon, axpy_neon, Isa::neon};
      return true;
#else
      return false;
#endif
  }
  return false;
}

double dot(const double* a, const double* b, std::size_t n) {
  return table().dot(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  table().axpy(alpha, x, y, n);
}

void matmul(const double* a, const double* b, double* c,
            std::size_t n, std::size_t m, std::size_t p) {
  std::memset(c, 0, n * p * sizeof(double));
  for (std::size_t i = 0; i < n; ++i) {
    const double* arow = a + i * m;
    double* crow = c + i * p;
    for (std::size_t k = 0; k < m; ++k) {
      const double aik = arow[k];
      if (aik != 0.0) axpy(aik, b + k * p, crow, p);
    }
  }
}

void matvec(const double* a, const double* x, double* y,
            std::size_t n, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) y[i] = dot(a + i * m, x, m);
}

}  // namespace kdual::kernels
