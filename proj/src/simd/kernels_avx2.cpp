#include "rsched/simd/kernels.hpp"

// AVX2+FMA variants.  This translation unit is the only one compiled with
// -mavx2 -mfma; it must not be entered unless the running CPU supports both
// (checked in avx2_or_null below via builtin CPU detection).

#if defined(RSCHED_BUILD_AVX2) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace rsched::simd {
namespace {

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
    __m128d lo = _mm256_castpd256_pd128(acc0);
    __m128d hi = _mm256_extractf128_pd(acc0, 1);
    lo = _mm_add_pd(lo, hi);
    double s = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scal_avx2(double alpha, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

double norm_inf_avx2(const double* x, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_max_pd(acc, _mm256_andnot_pd(sign, _mm256_loadu_pd(x + i)));
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    lo = _mm_max_pd(lo, hi);
    double m = _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) {
        const double a = x[i] < 0 ? -x[i] : x[i];
        if (a > m) m = a;
    }
    return m;
}

double sparse_dot_avx2(const std::int32_t* idx, const double* val,
                       std::size_t nnz, const double* dense) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= nnz; k += 4) {
        const __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + k));
        const __m256d g = _mm256_i32gather_pd(dense, vi, 8);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(val + k), g, acc);
    }
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    lo = _mm_add_pd(lo, hi);
    double s = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; k < nnz; ++k) s += val[k] * dense[idx[k]];
    return s;
}

// AVX2 has no scatter; keep the store scalar but vectorize the multiply.
void sparse_axpy_avx2(double alpha, const std::int32_t* idx, const double* val,
                      std::size_t nnz, double* dense) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t k = 0;
    alignas(32) double tmp[4];
    for (; k + 4 <= nnz; k += 4) {
        _mm256_store_pd(tmp, _mm256_mul_pd(va, _mm256_loadu_pd(val + k)));
        dense[idx[k]] += tmp[0];
        dense[idx[k + 1]] += tmp[1];
        dense[idx[k + 2]] += tmp[2];
        dense[idx[k + 3]] += tmp[3];
    }
    for (; k < nnz; ++k) dense[idx[k]] += alpha * val[k];
}

const Kernels kAvx2 = {
    dot_avx2,      axpy_avx2,       scal_avx2,
    norm_inf_avx2, sparse_dot_avx2, sparse_axpy_avx2,
};

}  // namespace

const Kernels* avx2_or_null() {
    static const bool ok =
        __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok ? &kAvx2 : nullptr;
}

}  // namespace rsched::simd

#else

namespace rsched::simd {
const Kernels* avx2_or_null() { return nullptr; }
}  // namespace rsched::simd

#endif
