#pragma once

#include <cstddef>
#include <vector>

namespace kpeaks::radial {

/// Strictly increasing radial nodes starting at r = 0.
class RadialGrid
{
  public:
    RadialGrid() = default;

    explicit RadialGrid(std::vector<double> nodes);

    /// Geometric grid: first spacing \p h0, spacing ratio \p ratio, last node >= \p r_max.
    static RadialGrid geometric(double h0, double ratio, double r_max);

    /// Uniform grid with \p count intervals on [0, r_max].
    static RadialGrid uniform(double r_max, std::size_t count);

    /// Same grid with every node multiplied by \p s.
    RadialGrid scaled(double s) const;

    const std::vector<double>& nodes() const
    {
        return nodes_;
    }

    std::size_t size() const
    {
        return nodes_.size();
    }

    double operator[](std::size_t i) const
    {
        return nodes_[i];
    }

    double r_max() const
    {
        return nodes_.back();
    }

    /// Index i of the interval [r_i, r_{i+1}] containing r (clamped to the grid).
    std::size_t locate(double r) const;

  private:
    std::vector<double> nodes_;
};

} // namespace kpeaks::radial
