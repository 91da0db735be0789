#include "kpeaks/fields/peak_boxes.hpp"

#include <cmath>
#include <algorithm>
#include <numbers>

#include <Eigen/Dense>

#include "kpeaks/core/error.hpp"

namespace kpeaks::fields {

PeakBoxes::PeakBoxes(std::vector<Vec3> centers, double half_width, int n)
    : centers_(std::move(centers))
    , half_width_(half_width)
    , n_(n)
{
    require(!centers_.empty(), "peak boxes need at least one center");
    require(n >= 5 && half_width > 0.0, "invalid peak box geometry");
    for (std::size_t i = 0; i < centers_.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            Vec3 d = centers_[i] - centers_[j];
            double sep = std::max({std::abs(d[0]), std::abs(d[1]), std::abs(d[2])});
            require(sep > 2.0 * half_width, "peak boxes overlap; reduce n or the nodes per width");
        }
    }
}

BoxSpec
PeakBoxes::spec(std::size_t box) const
{
    return BoxSpec{centers_[box], half_width_, n_};
}

Vec3
PeakBoxes::node(std::size_t idx) const
{
    std::size_t bs = box_size();
    std::size_t b = idx / bs;
    std::size_t r = idx % bs;
    std::size_t n = static_cast<std::size_t>(n_);
    double h = this->h();
    const Vec3& c = centers_[b];
    return {c[0] - half_width_ + static_cast<double>(r % n) * h, c[1] - half_width_ + static_cast<double>((r / n) % n) * h,
            c[2] - half_width_ + static_cast<double>(r / (n * n)) * h};
}

bool
PeakBoxes::on_boundary(std::size_t idx) const
{
    std::size_t n = static_cast<std::size_t>(n_);
    std::size_t r = idx % box_size();
    std::size_t i = r % n, j = (r / n) % n, k = r / (n * n);
    return i == 0 || j == 0 || k == 0 || i == n - 1 || j == n - 1 || k == n - 1;
}

Field3D
PeakBoxes::field(std::size_t box, const std::vector<double>& v) const
{
    auto first = v.begin() + static_cast<std::ptrdiff_t>(box * box_size());
    return Field3D(spec(box), std::vector<double>(first, first + static_cast<std::ptrdiff_t>(box_size())));
}

void
PeakBoxes::clear_boundary(std::vector<double>& v) const
{
    for (std::size_t idx = 0; idx < v.size(); ++idx) {
        if (on_boundary(idx)) {
            v[idx] = 0.0;
        }
    }
}

struct DirichletHelmholtz::Impl
{
    int n = 0;
    int m = 0;
    std::vector<double> eig;
    /// Orthonormal type-I sine matrix sqrt(2 / (m + 1)) sin(pi j k / (m + 1)); symmetric and its own inverse.
    Eigen::MatrixXd S;
};

DirichletHelmholtz::DirichletHelmholtz(int n, double h)
    : impl_(std::make_unique<Impl>())
{
    require(n >= 3 && h > 0.0, "invalid Helmholtz solver geometry");
    impl_->n = n;
    impl_->m = n - 2;
    int m = impl_->m;
    for (int k = 1; k <= m; ++k) {
        impl_->eig.push_back((2.0 - 2.0 * std::cos(k * std::numbers::pi / (m + 1))) / (h * h));
    }
    impl_->S.resize(m, m);
    double scale = std::sqrt(2.0 / (m + 1));
    for (int j = 0; j < m; ++j) {
        for (int k = 0; k < m; ++k) {
            impl_->S(j, k) = scale * std::sin(std::numbers::pi * (j + 1) * (k + 1) / (m + 1));
        }
    }
}

DirichletHelmholtz::~DirichletHelmholtz() = default;

namespace {

/// In-place sine transform of an m^3 block (x fastest) along all three axes, using t as scratch.
void
sine_transform_3d(const Eigen::MatrixXd& S, double* x, double* t, int m)
{
    using Map = Eigen::Map<Eigen::MatrixXd>;
    Eigen::Index mm = static_cast<Eigen::Index>(m) * m;
    // x axis: columns are (y, z) lines.
    Map(t, m, mm).noalias() = S * Map(x, m, mm);
    // y axis: each z-slab is an m x m matrix with y along the columns.
    for (int k = 0; k < m; ++k) {
        Map(x + k * mm, m, m).noalias() = Map(t + k * mm, m, m) * S;
    }
    // z axis: rows are (x, y) pairs.
    Map(t, mm, m).noalias() = Map(x, mm, m) * S;
    std::copy(t, t + mm * m, x);
}

} // namespace

void
DirichletHelmholtz::solve(const double* rhs, double* out, double alpha, double sigma) const
{
    int n = impl_->n;
    int m = impl_->m;
    std::size_t sn = static_cast<std::size_t>(n);
    std::size_t len = static_cast<std::size_t>(m) * m * m;
    // Per-thread scratch reused across calls.
    thread_local std::vector<double> a;
    thread_local std::vector<double> b;
    if (a.size() < len) {
        a.resize(len);
        b.resize(len);
    }
    for (int k = 0; k < m; ++k) {
        for (int j = 0; j < m; ++j) {
            const double* src = rhs + (k + 1) * sn * sn + (j + 1) * sn + 1;
            double* dst = a.data() + (static_cast<std::size_t>(k) * m + j) * m;
            for (int i = 0; i < m; ++i) {
                dst[i] = src[i];
            }
        }
    }
    sine_transform_3d(impl_->S, a.data(), b.data(), m);
    const auto& e = impl_->eig;
    for (int k = 0; k < m; ++k) {
        for (int j = 0; j < m; ++j) {
            double* row = a.data() + (static_cast<std::size_t>(k) * m + j) * m;
            for (int i = 0; i < m; ++i) {
                row[i] /= alpha * (e[k] + e[j] + e[i]) + sigma;
            }
        }
    }
    sine_transform_3d(impl_->S, a.data(), b.data(), m);
    for (std::size_t idx = 0; idx < sn * sn * sn; ++idx) {
        out[idx] = 0.0;
    }
    for (int k = 0; k < m; ++k) {
        for (int j = 0; j < m; ++j) {
            double* dst = out + (k + 1) * sn * sn + (j + 1) * sn + 1;
            const double* src = a.data() + (static_cast<std::size_t>(k) * m + j) * m;
            for (int i = 0; i < m; ++i) {
                dst[i] = src[i];
            }
        }
    }
}

} // namespace kpeaks::fields
