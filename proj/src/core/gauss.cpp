#include "kpeaks/core/gauss.hpp"

#include <cmath>
#include <numbers>

#include "kpeaks/core/error.hpp"

namespace kpeaks {

void
legendre(int n, double x, double& value, double& derivative)
{
    double p0 = 1.0;
    double p1 = x;
    if (n == 0) {
        value = 1.0;
        derivative = 0.0;
        return;
    }
    for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    value = p1;
    if (std::abs(x) == 1.0) {
        // P_n'(1) = n (n + 1) / 2, P_n'(-1) = (-1)^(n + 1) n (n + 1) / 2
        derivative = (x > 0 || n % 2 == 1 ? 1.0 : -1.0) * 0.5 * n * (n + 1);
        return;
    }
    derivative = n * (x * p1 - p0) / (x * x - 1.0);
}

QuadratureRule
gauss_legendre(int n)
{
    require(n >= 1, "gauss_legendre needs n >= 1");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double p = 0.0;
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            legendre(n, x, p, dp);
            double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        legendre(n, x, p, dp);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        rule.nodes[n / 2] = 0.0;
    }
    return rule;
}

QuadratureRule
gauss_legendre(int n, double a, double b)
{
    QuadratureRule rule = gauss_legendre(n);
    double half = 0.5 * (b - a);
    double mid = 0.5 * (b + a);
    for (std::size_t i = 0; i < rule.size(); ++i) {
        rule.nodes[i] = mid + half * rule.nodes[i];
        rule.weights[i] *= half;
    }
    return rule;
}

QuadratureRule
gauss_lobatto(int n)
{
    require(n >= 2, "gauss_lobatto needs n >= 2");
    int N = n - 1;
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    rule.nodes[0] = -1.0;
    rule.nodes[N] = 1.0;
    // Interior nodes are the roots of P_N'; Newton on (1 - x^2) P_N' with Chebyshev-Gauss-Lobatto seeds.
    for (int i = 1; i < N; ++i) {
        double x = -std::cos(std::numbers::pi * i / N);
        for (int it = 0; it < 100; ++it) {
            double p = 0.0;
            double dp = 0.0;
            legendre(N, x, p, dp);
            // q = (1 - x^2) P_N', q' = -N (N + 1) P_N
            double q = (1.0 - x * x) * dp;
            double dq = -N * (N + 1) * p;
            double dx = q / dq;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        rule.nodes[i] = x;
    }
    for (int i = 0; i < n; ++i) {
        double p = 0.0;
        double dp = 0.0;
        legendre(N, rule.nodes[i], p, dp);
        rule.weights[i] = 2.0 / (N * (N + 1) * p * p);
    }
    return rule;
}

QuadratureRule
composite_gauss(double a, double b, int panels, int order)
{
    require(panels >= 1, "composite_gauss needs at least one panel");
    QuadratureRule base = gauss_legendre(order);
    QuadratureRule rule;
    rule.nodes.reserve(static_cast<std::size_t>(panels) * order);
    rule.weights.reserve(static_cast<std::size_t>(panels) * order);
    double width = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
        double lo = a + k * width;
        double mid = lo + 0.5 * width;
        for (int i = 0; i < order; ++i) {
            rule.nodes.push_back(mid + 0.5 * width * base.nodes[i]);
            rule.weights.push_back(0.5 * width * base.weights[i]);
        }
    }
    return rule;
}

} // namespace kpeaks
