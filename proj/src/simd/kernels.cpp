#include "rsched/simd/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace rsched::simd {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal_scalar(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double norm_inf_scalar(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::fabs(x[i]);
        if (a > m) m = a;
    }
    return m;
}

double sparse_dot_scalar(const std::int32_t* idx, const double* val,
                         std::size_t nnz, const double* dense) {
    double s = 0.0;
    for (std::size_t k = 0; k < nnz; ++k) s += val[k] * dense[idx[k]];
    return s;
}

void sparse_axpy_scalar(double alpha, const std::int32_t* idx, const double* val,
                        std::size_t nnz, double* dense) {
    for (std::size_t k = 0; k < nnz; ++k) dense[idx[k]] += alpha * val[k];
}

const Kernels kScalar = {
    dot_scalar,    axpy_scalar,       scal_scalar,
    norm_inf_scalar, sparse_dot_scalar, sparse_axpy_scalar,
};

const Kernels* pick() {
    const char* want = std::getenv("RSCHED_SIMD");
    if (want != nullptr && std::strcmp(want, "scalar") == 0) return &kScalar;
    const Kernels* a = avx2_or_null();
    if (want != nullptr && std::strcmp(want, "avx2") == 0)
        return a != nullptr ? a : &kScalar;
    return a != nullptr ? a : &kScalar;
}

}  // namespace

const Kernels& scalar() { return kScalar; }

const Kernels& active() {
    static const Kernels* chosen = pick();
    return *chosen;
}

const char* active_name() {
    return &active() == &kScalar ? "scalar" : "avx2";
}

}  // namespace rsched::simd
