#include "kpeaks/radial/grid.hpp"

#include <algorithm>

#include "kpeaks/core/error.hpp"

namespace kpeaks::radial {

RadialGrid::RadialGrid(std::vector<double> nodes)
    : nodes_(std::move(nodes))
{
    require(nodes_.size() >= 2, "radial grid needs at least two nodes");
    require(nodes_.front() == 0.0, "radial grid must start at r = 0");
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        require(nodes_[i] > nodes_[i - 1], "radial grid must be strictly increasing");
    }
}

RadialGrid
RadialGrid::geometric(double h0, double ratio, double r_max)
{
    require(h0 > 0.0 && ratio >= 1.0 && r_max > h0, "invalid geometric grid parameters");
    std::vector<double> nodes{0.0};
    double h = h0;
    while (nodes.back() < r_max) {
        nodes.push_back(nodes.back() + h);
        h *= ratio;
    }
    return RadialGrid(std::move(nodes));
}

RadialGrid
RadialGrid::uniform(double r_max, std::size_t count)
{
    require(count >= 1 && r_max > 0.0, "invalid uniform grid parameters");
    std::vector<double> nodes(count + 1);
    for (std::size_t i = 0; i <= count; ++i) {
        nodes[i] = r_max * static_cast<double>(i) / static_cast<double>(count);
    }
    return RadialGrid(std::move(nodes));
}

RadialGrid
RadialGrid::scaled(double s) const
{
    require(s > 0.0, "grid scale must be positive");
    std::vector<double> nodes(nodes_);
    for (double& r : nodes) {
        r *= s;
    }
    return RadialGrid(std::move(nodes));
}

std::size_t
RadialGrid::locate(double r) const
{
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
    std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
    if (i == 0) {
        return 0;
    }
    return std::min(i - 1, nodes_.size() - 2);
}

} // namespace kpeaks::radial
