#include "kpeaks/core/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kpeaks/simd/kernels.hpp"

namespace kpeaks {

namespace {

double
vdot(const Vector& x, const Vector& y)
{
    return simd::dot(x.data(), y.data(), x.size());
}

} // namespace

KrylovResult
minres(const LinearOperator& A, const LinearOperator& precond, const Vector& b, Vector& x, double rtol,
       int max_iterations)
{
    std::size_t n = b.size();
    KrylovResult out;
    Vector r1(n), y(n), v(n), w(n, 0.0), w1(n), w2(n, 0.0);
    A(x, y);
    for (std::size_t i = 0; i < n; ++i) {
        r1[i] = b[i] - y[i];
    }
    precond(r1, y);
    double beta1 = vdot(r1, y);
    if (beta1 <= 0.0) {
        out.converged = true;
        return out;
    }
    beta1 = std::sqrt(beta1);
    Vector r2 = r1;
    double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
    double cs = -1.0, sn = 0.0;
    for (int itn = 1; itn <= max_iterations; ++itn) {
        double s = 1.0 / beta;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = s * y[i];
        }
        A(v, y);
        if (itn >= 2) {
            double f = beta / oldb;
            for (std::size_t i = 0; i < n; ++i) {
                y[i] -= f * r1[i];
            }
        }
        double alfa = vdot(v, y);
        double f = alfa / beta;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] -= f * r2[i];
        }
        std::swap(r1, r2);
        r2 = y;
        precond(r2, y);
        oldb = beta;
        beta = std::sqrt(std::max(0.0, vdot(r2, y)));
        double oldeps = epsln;
        double delta = cs * dbar + sn * alfa;
        double gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        double gamma = std::max(std::hypot(gbar, beta), std::numeric_limits<double>::min());
        cs = gbar / gamma;
        sn = beta / gamma;
        double phi = cs * phibar;
        phibar = sn * phibar;
        double denom = 1.0 / gamma;
        std::swap(w1, w2);
        std::swap(w2, w);
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) * denom;
            x[i] += phi * w[i];
        }
        out.iterations = itn;
        out.relative_residual = phibar / beta1;
        if (out.relative_residual <= rtol || beta == 0.0) {
            out.converged = true;
            break;
        }
    }
    return out;
}

KrylovResult
pcg(const LinearOperator& A, const LinearOperator& precond, const Vector& b, Vector& x, double rtol,
    int max_iterations)
{
    std::size_t n = b.size();
    KrylovResult out;
    Vector r(n), z(n), p(n), q(n);
    A(x, q);
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = b[i] - q[i];
    }
    precond(r, z);
    double rz = vdot(r, z);
    if (rz <= 0.0) {
        out.converged = true;
        return out;
    }
    double r0 = std::sqrt(rz);
    p = z;
    for (int itn = 1; itn <= max_iterations; ++itn) {
        A(p, q);
        double alpha = rz / vdot(p, q);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        precond(r, z);
        double rz_new = vdot(r, z);
        out.iterations = itn;
        out.relative_residual = std::sqrt(std::max(0.0, rz_new)) / r0;
        if (out.relative_residual <= rtol) {
            out.converged = true;
            break;
        }
        double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = z[i] + beta * p[i];
        }
    }
    return out;
}

} // namespace kpeaks
