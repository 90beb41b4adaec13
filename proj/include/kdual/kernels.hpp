#pragma once

#include <cstddef>

// Low-level dense kernels with runtime ISA dispatch. Everything above this
// layer (matmul, fractional stencils, reductions) funnels through dot/axpy,
// so forcing the scalar path here is enough to cross-check the SIMD variants.
namespace kdual::kernels {

enum class Isa { scalar, avx2, neon };

// ISA selected for subsequent calls; defaults to the best supported one.
Isa active();
bool supported(Isa isa);
// Test hook: switch the dispatch table. Returns false (and keeps the current
// table) if the requested ISA is not supported on this machine.
bool force(Isa isa);

double dot(const double* a, const double* b, std::size_t n);

// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);

// c = a * b with a: n x m, b: m x p, c: n x p, all row-major dense.
void matmul(const double* a, const double* b, double* c,
            std::size_t n, std::size_t m, std::size_t p);

// y = a * x with a: n x m row-major.
void matvec(const double* a, const double* x, double* y,
            std::size_t n, std::size_t m);

}  // namespace kdual::kernels
