#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "rsched/simd/kernels.hpp"

using rsched::simd::Kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> d(-5.0, 5.0);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

}  // namespace

TEST_CASE("dispatched kernels match scalar reference") {
    const Kernels& s = rsched::simd::scalar();
    const Kernels& a = rsched::simd::active();
    std::mt19937_64 rng(7);

    for (const std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 17u, 64u, 1001u}) {
        std::vector<double> x = random_vec(rng, n);
        std::vector<double> y = random_vec(rng, n);

        CHECK(a.dot(x.data(), y.data(), n) ==
              doctest::Approx(s.dot(x.data(), y.data(), n)).epsilon(1e-12));
        CHECK(a.norm_inf(x.data(), n) == s.norm_inf(x.data(), n));

        std::vector<double> y1 = y, y2 = y;
        s.axpy(1.75, x.data(), y1.data(), n);
        a.axpy(1.75, x.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(y2[i] == doctest::Approx(y1[i]).epsilon(1e-14));

        std::vector<double> z1 = x, z2 = x;
        s.scal(-0.375, z1.data(), n);
        a.scal(-0.375, z2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(z2[i] == z1[i]);

        // sparse: indices into a dense vector of size 2n+4
        std::vector<double> dense = random_vec(rng, 2 * n + 4);
        std::vector<int32_t> idx(n);
        std::uniform_int_distribution<int32_t> id(
            0, static_cast<int32_t>(dense.size()) - 1);
        for (auto& i : idx) i = id(rng);

        CHECK(a.sparse_dot(idx.data(), x.data(), n, dense.data()) ==
              doctest::Approx(s.sparse_dot(idx.data(), x.data(), n,
                                           dense.data()))
                  .epsilon(1e-12));

        // sparse_axpy writes may collide on repeated indices; use unique ones
        std::vector<int32_t> uniq(n);
        for (std::size_t i = 0; i < n; ++i) uniq[i] = static_cast<int32_t>(2 * i);
        std::vector<double> d1 = dense, d2 = dense;
        s.sparse_axpy(0.625, uniq.data(), x.data(), n, d1.data());
        a.sparse_axpy(0.625, uniq.data(), x.data(), n, d2.data());
        for (std::size_t i = 0; i < dense.size(); ++i)
            CHECK(d2[i] == doctest::Approx(d1[i]).epsilon(1e-14));
    }
}

TEST_CASE("active kernel name is a known variant") {
    const char* nm = rsched::simd::active_name();
    const bool known = std::string(nm) == "scalar" || std::string(nm) == "avx2";
    CHECK(known);
}
