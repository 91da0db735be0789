#include <cstddef>

#include "kpeaks/simd/kernels.hpp"

namespace kpeaks::simd {

namespace {

void
zero_boundary(double* y, int n)
{
    std::size_t nn = static_cast<std::size_t>(n) * n;
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            double* row = y + k * nn + static_cast<std::size_t>(j) * n;
            if (k == 0 || k == n - 1 || j == 0 || j == n - 1) {
                for (int i = 0; i < n; ++i) {
                    row[i] = 0.0;
                }
            } else {
                row[0] = 0.0;
                row[n - 1] = 0.0;
            }
        }
    }
}

void
neg_laplacian_scalar(const double* x, double* y, int n, double inv_h2)
{
    std::size_t sn = static_cast<std::size_t>(n);
    std::size_t nn = sn * sn;
    zero_boundary(y, n);
    for (int k = 1; k < n - 1; ++k) {
        for (int j = 1; j < n - 1; ++j) {
            std::size_t base = k * nn + j * sn;
            for (int i = 1; i < n - 1; ++i) {
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

void
helmholtz_scalar(const double* x, double* y, const double* diag, double alpha, int n, double inv_h2)
{
    std::size_t sn = static_cast<std::size_t>(n);
    std::size_t nn = sn * sn;
    zero_boundary(y, n);
    for (int k = 1; k < n - 1; ++k) {
        for (int j = 1; j < n - 1; ++j) {
            std::size_t base = k * nn + j * sn;
            for (int i = 1; i < n - 1; ++i) {
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

double
dot_scalar(const double* x, const double* y, std::size_t len)
{
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        for (int l = 0; l < 4; ++l) {
            double prod = x[i + l] * y[i + l];
            acc[l] = acc[l] + prod;
        }
    }
    double s = (acc[0] + acc[2]) + (acc[1] + acc[3]);
    for (; i < len; ++i) {
        double prod = x[i] * y[i];
        s = s + prod;
    }
    return s;
}

void
axpy_scalar(double a, const double* x, double* y, std::size_t len)
{
    for (std::size_t i = 0; i < len; ++i) {
        double prod = a * x[i];
        y[i] = y[i] + prod;
    }
}

void
xpby_scalar(const double* x, double b, double* y, std::size_t len)
{
    for (std::size_t i = 0; i < len; ++i) {
        double prod = b * y[i];
        y[i] = x[i] + prod;
    }
}

} // namespace

const KernelTable&
scalar_kernels()
{
    static const KernelTable table{"scalar", neg_laplacian_scalar, helmholtz_scalar, dot_scalar, axpy_scalar, xpby_scalar};
    return table;
}

} // namespace kpeaks::simd
