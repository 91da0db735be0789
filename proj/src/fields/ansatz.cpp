#include "kpeaks/fields/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kpeaks/core/error.hpp"
#include "kpeaks/core/parallel.hpp"

namespace kpeaks::fields {

namespace {

double
min_pair_distance(const std::vector<Vec3>& c)
{
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            d = std::min(d, distance(c[i], c[j]));
        }
    }
    return d;
}

} // namespace

PeakDomain
PeakDomain::preset(const std::vector<Vec3>& centers)
{
    PeakDomain d;
    d.centers = centers;
    d.delta = std::min(0.24 * min_pair_distance(centers), 0.5);
    return d;
}

void
PeakDomain::validate() const
{
    require(!centers.empty(), "peak domain needs at least one center");
    require(delta > 0.0, "delta must be positive");
    require(delta < 0.25 * min_pair_distance(centers), "delta must be below a quarter of the minimal well distance");
}

double
PeakDomain::margin(const std::vector<Vec3>& Y) const
{
    require(Y.size() == centers.size(), "peak count does not match the domain");
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < Y.size(); ++i) {
        m = std::min(m, delta - distance(Y[i], centers[i]));
    }
    return m;
}

bool
PeakDomain::contains(const std::vector<Vec3>& Y) const
{
    return margin(Y) >= 0.0;
}

PeakSet::PeakSet(double eps, std::vector<Vec3> centers, std::vector<radial::RadialProfile> profiles, double amplitude)
    : eps_(eps)
    , centers_(std::move(centers))
    , profiles_(std::move(profiles))
    , amplitude_(amplitude)
{
    require(eps_ > 0.0, "eps must be positive");
    require(centers_.size() == profiles_.size(), "one profile per peak is required");
}

FieldSample
PeakSet::eval_peak(std::size_t i, const Vec3& x) const
{
    FieldSample out;
    Vec3 d = x - centers_[i];
    double dist = norm(d);
    double rho = dist / eps_;
    radial::RadialSample s = profiles_[i].sample(rho);
    out.value = amplitude_ * s.value;
    out.laplacian = amplitude_ * s.laplacian / (eps_ * eps_);
    if (dist > 0.0) {
        double g = amplitude_ * s.deriv / (eps_ * dist);
        out.grad = g * d;
    }
    return out;
}

FieldSample
PeakSet::eval(const Vec3& x) const
{
    FieldSample out;
    for (std::size_t i = 0; i < centers_.size(); ++i) {
        FieldSample s = eval_peak(i, x);
        out.value += s.value;
        out.grad = out.grad + s.grad;
        out.laplacian += s.laplacian;
    }
    return out;
}

double
PeakSet::value(const Vec3& x) const
{
    double v = 0.0;
    for (std::size_t i = 0; i < centers_.size(); ++i) {
        v += profiles_[i].value(distance(x, centers_[i]) / eps_);
    }
    return amplitude_ * v;
}

PeakSet
PeakSet::scaled(double m) const
{
    PeakSet out(*this);
    out.amplitude_ *= m;
    return out;
}

PeakSet
PeakSet::moved(std::vector<Vec3> centers) const
{
    require(centers.size() == centers_.size(), "peak count mismatch");
    PeakSet out(*this);
    out.centers_ = std::move(centers);
    return out;
}

double
PeakSet::decay_length(std::size_t i) const
{
    return eps_ / profiles_[i].tail().rate;
}

void
AnsatzState::validate() const
{
    require(eps > 0.0, "eps must be positive");
    require(limit != nullptr, "ansatz needs a limit system");
    require(Y.size() == limit->size(), "one peak position per well is required");
    if (corrector) {
        require(corrector->size() == Y.size(), "one corrector box per peak is required");
    }
}

PeakSet
assemble_ansatz(const AnsatzState& state)
{
    state.validate();
    return PeakSet(state.eps, state.Y, state.limit->w_profiles);
}

Field3D
sample_on_box(const PeakSet& peaks, const BoxSpec& box, double boundary_tol)
{
    Field3D f(box);
    std::size_t n2 = static_cast<std::size_t>(box.n) * box.n;
    parallel_blocks(static_cast<std::size_t>(box.n), [&](std::size_t k) {
        for (std::size_t idx = k * n2; idx < (k + 1) * n2; ++idx) {
            f[idx] = peaks.value(f.node(idx));
        }
    });
    double peak = f.max_abs();
    double edge = f.boundary_max_abs();
    if (edge > boundary_tol * peak) {
        std::ostringstream msg;
        msg << "boundary value " << edge << " exceeds " << boundary_tol << " x max " << peak;
        throw Error(ErrorCode::BoxTooSmall, msg.str());
    }
    return f;
}

Field3D
assemble_ansatz(const AnsatzState& state, const BoxSpec& box)
{
    return sample_on_box(assemble_ansatz(state), box);
}

} // namespace kpeaks::fields
