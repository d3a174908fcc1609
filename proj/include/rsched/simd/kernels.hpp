#pragma once

#include <cstddef>
#include <cstdint>

// Dense/sparse vector kernels used by the simplex inner loops.  A scalar
// reference implementation is always available; an AVX2+FMA variant is
// selected at runtime when the CPU supports it.  The environment variable
// RSCHED_SIMD=scalar|avx2 overrides the automatic choice (requests for an
// unsupported variant fall back to scalar).

namespace rsched::simd {

struct Kernels {
    // dense
    double (*dot)(const double* a, const double* b, std::size_t n);
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    void (*scal)(double alpha, double* x, std::size_t n);
    double (*norm_inf)(const double* x, std::size_t n);
    // sparse (index/value pairs against a dense vector)
    double (*sparse_dot)(const std::int32_t* idx, const double* val,
                         std::size_t nnz, const double* dense);
    void (*sparse_axpy)(double alpha, const std::int32_t* idx, const double* val,
                        std::size_t nnz, double* dense);
};

// Reference implementation (pure scalar, no ISA extensions).
const Kernels& scalar();

// AVX2+FMA implementation, or nullptr when not compiled in / not supported
// by the running CPU.
const Kernels* avx2_or_null();

// The runtime-selected implementation (resolved once, thread-safe).
const Kernels& active();

// Name of the selected implementation: "scalar" or "avx2".
const char* active_name();

}  // namespace rsched::simd
