#include "kpeaks/fields/spherical.hpp"

#include <cmath>
#include <numbers>

#include "kpeaks/core/error.hpp"
#include "kpeaks/core/gauss.hpp"

namespace kpeaks::fields {

std::vector<AngularNode>
angular_rule(int n_theta, int n_phi)
{
    require(n_theta >= 1 && n_phi >= 1, "angular orders must be positive");
    QuadratureRule gl = gauss_legendre(n_theta);
    std::vector<AngularNode> out;
    out.reserve(static_cast<std::size_t>(n_theta) * n_phi);
    double dphi = 2.0 * std::numbers::pi / n_phi;
    for (int a = 0; a < n_theta; ++a) {
        double ct = gl.nodes[a];
        double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int b = 0; b < n_phi; ++b) {
            double phi = (b + 0.5) * dphi;
            out.push_back({{st * std::cos(phi), st * std::sin(phi), ct}, gl.weights[a] * dphi});
        }
    }
    return out;
}

RadialNodes
radial_rule(double R, double panel, int order)
{
    require(R > 0.0 && panel > 0.0, "radial rule needs a positive radius and panel width");
    int panels = std::max(1, static_cast<int>(std::ceil(R / panel - 1e-12)));
    QuadratureRule q = composite_gauss(0.0, R, panels, order);
    RadialNodes out;
    out.r = q.nodes;
    out.weight.resize(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        out.weight[i] = q.weights[i] * q.nodes[i] * q.nodes[i];
    }
    return out;
}

SphericalQuadrature::SphericalQuadrature(const PeakSet& peaks, const SphericalSettings& settings)
    : settings_(settings)
    , centers_(peaks.centers())
    , angular_(angular_rule(settings.n_theta, settings.n_phi))
{
    require(peaks.size() > 0, "spherical quadrature needs at least one peak");
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        double len = peaks.decay_length(i);
        double R = peaks.eps() * peaks.profiles()[i].radius_below(settings.cutoff);
        double panel = std::min(settings.panel_width * len, settings.max_panel);
        lengths_.push_back(len);
        radial_.push_back(radial_rule(R, panel, settings.radial_order));
    }
}

std::size_t
SphericalQuadrature::node_count() const
{
    std::size_t n = 0;
    for (const auto& r : radial_) {
        n += r.r.size() * angular_.size();
    }
    return n;
}

double
SphericalQuadrature::partition(std::size_t i, const Vec3& x) const
{
    if (centers_.size() == 1) {
        return 1.0;
    }
    double beta = settings_.partition_sharpness;
    double ti = beta * distance(x, centers_[i]) / lengths_[i];
    double sum = 0.0;
    for (std::size_t j = 0; j < centers_.size(); ++j) {
        double tj = beta * distance(x, centers_[j]) / lengths_[j];
        sum += std::exp(std::min(ti - tj, 700.0));
    }
    return 1.0 / sum;
}

} // namespace kpeaks::fields
