#include <doctest.h>

#include <random>
#include <vector>

#include "kpeaks/core/parallel.hpp"
#include "kpeaks/simd/kernels.hpp"

using namespace kpeaks;

namespace {

std::vector<double>
random_field(std::size_t len, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(len);
    for (auto& x : v) {
        x = dist(rng);
    }
    return v;
}

} // namespace

TEST_CASE("vector kernels are bitwise identical to the scalar reference")
{
    const simd::KernelTable* vec = simd::avx2_kernels();
    if (vec == nullptr) {
        MESSAGE("AVX2 unavailable; nothing to compare");
        return;
    }
    const simd::KernelTable& ref = simd::scalar_kernels();
    for (int n : {5, 13, 32}) {
        std::size_t len = static_cast<std::size_t>(n) * n * n;
        auto x = random_field(len, 1);
        auto d = random_field(len, 2);
        std::vector<double> y1(len, 7.0), y2(len, -7.0);
        ref.neg_laplacian(x.data(), y1.data(), n, 3.5);
        vec->neg_laplacian(x.data(), y2.data(), n, 3.5);
        CHECK(y1 == y2);
        ref.helmholtz(x.data(), y1.data(), d.data(), 0.7, n, 3.5);
        vec->helmholtz(x.data(), y2.data(), d.data(), 0.7, n, 3.5);
        CHECK(y1 == y2);
        CHECK(ref.dot(x.data(), d.data(), len) == vec->dot(x.data(), d.data(), len));
        std::vector<double> a1(d), a2(d);
        ref.axpy(0.3, x.data(), a1.data(), len);
        vec->axpy(0.3, x.data(), a2.data(), len);
        CHECK(a1 == a2);
        ref.xpby(x.data(), -1.1, a1.data(), len);
        vec->xpby(x.data(), -1.1, a2.data(), len);
        CHECK(a1 == a2);
    }
}

TEST_CASE("seven-point Laplacian is exact on quadratics")
{
    const auto& k = simd::active_kernels();
    int n = 9;
    double h = 0.25;
    std::vector<double> x(n * n * n), y(n * n * n);
    for (int kk = 0; kk < n; ++kk) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                double a = i * h, b = j * h, c = kk * h;
                x[i + n * (j + n * kk)] = a * a + 2.0 * b * b - c * c + a * b;
            }
        }
    }
    k.neg_laplacian(x.data(), y.data(), n, 1.0 / (h * h));
    CHECK(y[4 + n * (4 + n * 4)] == doctest::Approx(-4.0));
    CHECK(y[0] == 0.0);
}

TEST_CASE("deterministic dot product does not depend on the thread count")
{
    auto x = random_field(100003, 3);
    auto y = random_field(100003, 4);
    set_thread_count(1);
    double d1 = simd::dot(x.data(), y.data(), x.size());
    set_thread_count(3);
    double d3 = simd::dot(x.data(), y.data(), x.size());
    set_thread_count(1);
    CHECK(d1 == d3);
}
