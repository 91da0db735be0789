#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "kpeaks/core/parallel.hpp"
#include "kpeaks/core/vec3.hpp"
#include "kpeaks/fields/field3d.hpp"

namespace kpeaks::fields {

/// One n^3 lattice per peak, centered at y^i, with a common spacing h. Vectors on the layout
/// concatenate the boxes, each stored x-fastest with Dirichlet zeros on its boundary nodes.
class PeakBoxes
{
  public:
    /// Throws Error(InvalidArgument) when two boxes overlap.
    PeakBoxes(std::vector<Vec3> centers, double half_width, int n);

    /// Half-width giving \p nodes_per_width lattice spacings across the peak width w.
    static double half_width_for(double width, int n, double nodes_per_width = 8.0)
    {
        return 0.5 * (n - 1) * width / nodes_per_width;
    }

    std::size_t count() const
    {
        return centers_.size();
    }
    int n() const
    {
        return n_;
    }
    double h() const
    {
        return 2.0 * half_width_ / (n_ - 1);
    }
    double half_width() const
    {
        return half_width_;
    }
    const std::vector<Vec3>& centers() const
    {
        return centers_;
    }
    std::size_t box_size() const
    {
        return static_cast<std::size_t>(n_) * n_ * n_;
    }
    std::size_t size() const
    {
        return count() * box_size();
    }

    BoxSpec spec(std::size_t box) const;
    Vec3 node(std::size_t idx) const;
    bool on_boundary(std::size_t idx) const;

    /// Values of f at every node (boundary nodes included), evaluated in parallel.
    template <class F>
    std::vector<double> sample(F&& f) const;

    /// Copy of one box as a Field3D.
    Field3D field(std::size_t box, const std::vector<double>& v) const;

    /// Sets boundary nodes to zero.
    void clear_boundary(std::vector<double>& v) const;

  private:
    std::vector<Vec3> centers_;
    double half_width_;
    int n_;
};

template <class F>
std::vector<double>
PeakBoxes::sample(F&& f) const
{
    std::vector<double> out(size());
    std::size_t slab = static_cast<std::size_t>(n_) * n_;
    parallel_blocks(count() * n_, [&](std::size_t s) {
        for (std::size_t idx = s * slab; idx < (s + 1) * slab; ++idx) {
            out[idx] = f(node(idx));
        }
    });
    return out;
}

/// Exact inverse of alpha (-Delta_h) + sigma on the interior of an n^3 box with Dirichlet
/// boundary, through three-dimensional type-I sine transforms.
class DirichletHelmholtz
{
  public:
    DirichletHelmholtz(int n, double h);
    ~DirichletHelmholtz();
    DirichletHelmholtz(const DirichletHelmholtz&) = delete;
    DirichletHelmholtz& operator=(const DirichletHelmholtz&) = delete;

    /// out = (alpha (-Delta_h) + sigma)^{-1} rhs on interior nodes; boundary entries of out are zero.
    /// Both arrays use the full n^3 layout. Safe to call concurrently.
    void solve(const double* rhs, double* out, double alpha, double sigma) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace kpeaks::fields
