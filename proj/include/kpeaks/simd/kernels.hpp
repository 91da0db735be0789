#pragma once

#include <cstddef>

namespace kpeaks::simd {

/// Lattice kernels on an n^3 grid stored x-fastest; boundary nodes carry Dirichlet zeros.
///
/// Every variant evaluates the same arithmetic in the same order (no fused multiply-add),
/// so scalar and vector results are bitwise identical.
struct KernelTable
{
    const char* name;

    /// y = (-Delta_h x) on interior nodes, y = 0 on the boundary.
    void (*neg_laplacian)(const double* x, double* y, int n, double inv_h2);

    /// y = alpha (-Delta_h x) + diag x on interior nodes, y = 0 on the boundary.
    void (*helmholtz)(const double* x, double* y, const double* diag, double alpha, int n, double inv_h2);

    /// Sum of x[i] y[i] over [0, len) with four interleaved partial sums.
    double (*dot)(const double* x, const double* y, std::size_t len);

    /// y += a x.
    void (*axpy)(double a, const double* x, double* y, std::size_t len);

    /// y = x + b y.
    void (*xpby)(const double* x, double b, double* y, std::size_t len);
};

const KernelTable& scalar_kernels();

/// Vector kernels, or nullptr when the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// Kernels selected at startup; KPEAKS_SIMD=scalar forces the reference path.
const KernelTable& active_kernels();

/// Deterministic dot product over fixed reduction blocks.
double dot(const double* x, const double* y, std::size_t len);

} // namespace kpeaks::simd
