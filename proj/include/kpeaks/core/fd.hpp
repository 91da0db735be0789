#pragma once

#include <vector>

namespace kpeaks {

/// Finite-difference weights for the \p order-th derivative at \p x0 from the given nodes
/// (Fornberg's recursion; exact for polynomials of degree < nodes.size()).
std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int order);

} // namespace kpeaks
