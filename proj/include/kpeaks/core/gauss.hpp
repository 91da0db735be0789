#pragma once

#include <vector>

namespace kpeaks {

/// Nodes and weights of a one-dimensional quadrature rule.
struct QuadratureRule
{
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const
    {
        return nodes.size();
    }
};

/// Gauss-Legendre rule with \p n points on [-1, 1].
QuadratureRule gauss_legendre(int n);

/// Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// Gauss-Lobatto-Legendre rule with \p n points on [-1, 1] (endpoints included).
QuadratureRule gauss_lobatto(int n);

/// Composite Gauss-Legendre rule on [a, b] with \p panels equal panels of \p order points each.
QuadratureRule composite_gauss(double a, double b, int panels, int order);

/// Legendre polynomial P_n and its derivative at x.
void legendre(int n, double x, double& value, double& derivative);

} // namespace kpeaks
