#include <immintrin.h>

#include <cstddef>

#include "kpeaks/simd/kernels.hpp"

namespace kpeaks::simd {

namespace {

#define KPEAKS_AVX2 __attribute__((target("avx2")))

KPEAKS_AVX2 void
zero_boundary_avx2(double* y, int n)
{
    std::size_t nn = static_cast<std::size_t>(n) * n;
    __m256d zero = _mm256_setzero_pd();
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            double* row = y + k * nn + static_cast<std::size_t>(j) * n;
            if (k == 0 || k == n - 1 || j == 0 || j == n - 1) {
                int i = 0;
                for (; i + 4 <= n; i += 4) {
                    _mm256_storeu_pd(row + i, zero);
                }
                for (; i < n; ++i) {
                    row[i] = 0.0;
                }
            } else {
                row[0] = 0.0;
                row[n - 1] = 0.0;
            }
        }
    }
}

/// Sum of the six neighbours, accumulated in the same order as the scalar kernel.
KPEAKS_AVX2 inline __m256d
neighbour_sum(const double* x, std::size_t c, std::size_t sn, std::size_t nn)
{
    __m256d s = _mm256_add_pd(_mm256_loadu_pd(x + c - 1), _mm256_loadu_pd(x + c + 1));
    s = _mm256_add_pd(s, _mm256_loadu_pd(x + c - sn));
    s = _mm256_add_pd(s, _mm256_loadu_pd(x + c + sn));
    s = _mm256_add_pd(s, _mm256_loadu_pd(x + c - nn));
    s = _mm256_add_pd(s, _mm256_loadu_pd(x + c + nn));
    return s;
}

KPEAKS_AVX2 void
neg_laplacian_avx2(const double* x, double* y, int n, double inv_h2)
{
    std::size_t sn = static_cast<std::size_t>(n);
    std::size_t nn = sn * sn;
    zero_boundary_avx2(y, n);
    __m256d six = _mm256_set1_pd(6.0);
    __m256d ih = _mm256_set1_pd(inv_h2);
    for (int k = 1; k < n - 1; ++k) {
        for (int j = 1; j < n - 1; ++j) {
            std::size_t base = k * nn + j * sn;
            int i = 1;
            for (; i + 4 <= n - 1; i += 4) {
                std::size_t c = base + i;
                __m256d s = neighbour_sum(x, c, sn, nn);
                __m256d centre = _mm256_mul_pd(six, _mm256_loadu_pd(x + c));
                _mm256_storeu_pd(y + c, _mm256_mul_pd(_mm256_sub_pd(centre, s), ih));
            }
            for (; i < n - 1; ++i) {
                std::size_t c = base + i;
                double s = x[c - 1] + x[c + 1];
                s += x[c - sn];
                s += x[c + sn];
                s += x[c - nn];
                s += x[c + nn];
                y[c] = (6.0 * x[c] - s) * inv_h2;
            }
        }
    }
}

KPEAKS_AVX2 void
helmholtz_avx2(const double* x, double* y, const double* diag, double alpha, int n, double inv_h2)
{
    std::size_t sn = static_cast<std::size_t>(n);
    std::size_t nn = sn * sn;
    zero_boundary_avx2(y, n);
    __m256d six = _mm256_set1_pd(6.0);
    __m256d ih = _mm256_set1_pd(inv_h2);
    __m256d al = _mm256_set1_pd(alpha);
    for (int k = 1; k < n - 1; ++k) {
        for (int j = 1; j < n - 1; ++j) {
            std::size_t base = k * nn + j * sn;
            int i = 1;
            for (; i + 4 <= n - 1; i += 4) {
                std::size_t c = base + i;
                __m256d xc = _mm256_loadu_pd(x + c);
                __m256d s = neighbour_sum(x, c, sn, nn);
                __m256d lap = _mm256_mul_pd(_mm256_sub_pd(_mm256_mul_pd(six, xc), s), ih);
                __m256d out = _mm256_add_pd(_mm256_mul_pd(al, lap), _mm256_mul_pd(_mm256_loadu_pd(diag + c), xc));
                _mm256_storeu_pd(y + c, out);
            }
            for (; i < n - 1; ++i) {
                std::size_t c = base + i;
                double s = x[c - 1] + x[c + 1];
                s += x[c - sn];
                s += x[c + sn];
                s += x[c - nn];
                s += x[c + nn];
                double lap = (6.0 * x[c] - s) * inv_h2;
                y[c] = alpha * lap + diag[c] * x[c];
            }
        }
    }
}

KPEAKS_AVX2 double
dot_avx2(const double* x, const double* y, std::size_t len)
{
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = (lanes[0] + lanes[2]) + (lanes[1] + lanes[3]);
    for (; i < len; ++i) {
        double prod = x[i] * y[i];
        s = s + prod;
    }
    return s;
}

KPEAKS_AVX2 void
axpy_avx2(double a, const double* x, double* y, std::size_t len)
{
    __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        __m256d prod = _mm256_mul_pd(av, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
    }
    for (; i < len; ++i) {
        double prod = a * x[i];
        y[i] = y[i] + prod;
    }
}

KPEAKS_AVX2 void
xpby_avx2(const double* x, double b, double* y, std::size_t len)
{
    __m256d bv = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        __m256d prod = _mm256_mul_pd(bv, _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(x + i), prod));
    }
    for (; i < len; ++i) {
        double prod = b * y[i];
        y[i] = x[i] + prod;
    }
}

#undef KPEAKS_AVX2

} // namespace

const KernelTable*
avx2_kernels()
{
    static const KernelTable table{"avx2", neg_laplacian_avx2, helmholtz_avx2, dot_avx2, axpy_avx2, xpby_avx2};
    __builtin_cpu_init();
    if (!__builtin_cpu_supports("avx2")) {
        return nullptr;
    }
    return &table;
}

} // namespace kpeaks::simd
