#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "kpeaks/core/vec3.hpp"

namespace kpeaks::fields {

/// Cube [center - L, center + L]^3 with n nodes per axis (boundary nodes included).
struct BoxSpec
{
    Vec3 center{0.0, 0.0, 0.0};
    double half_width = 1.0;
    int n = 48;

    double h() const
    {
        return 2.0 * half_width / (n - 1);
    }
};

/// Lattice values on a BoxSpec, stored x-fastest: index = i + n (j + n k).
class Field3D
{
  public:
    Field3D() = default;
    explicit Field3D(const BoxSpec& box);
    Field3D(const BoxSpec& box, std::vector<double> values);

    const BoxSpec& box() const
    {
        return box_;
    }
    int n() const
    {
        return box_.n;
    }
    double h() const
    {
        return box_.h();
    }
    std::size_t size() const
    {
        return values_.size();
    }
    std::vector<double>& values()
    {
        return values_;
    }
    const std::vector<double>& values() const
    {
        return values_;
    }
    double& operator[](std::size_t idx)
    {
        return values_[idx];
    }
    double operator[](std::size_t idx) const
    {
        return values_[idx];
    }

    std::size_t index(int i, int j, int k) const
    {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(box_.n) * (j + static_cast<std::size_t>(box_.n) * k);
    }

    Vec3 node(int i, int j, int k) const;
    Vec3 node(std::size_t idx) const;

    bool on_boundary(std::size_t idx) const;

    double max_abs() const;
    double boundary_max_abs() const;

    /// Trilinear interpolation; zero outside the box.
    double interpolate(const Vec3& x) const;

    /// Writes <stem>.bin (raw little-endian doubles) and <stem>.json (L, n, center, ordering).
    void write(const std::filesystem::path& stem) const;
    static Field3D read(const std::filesystem::path& stem);

  private:
    BoxSpec box_;
    std::vector<double> values_;
};

} // namespace kpeaks::fields
