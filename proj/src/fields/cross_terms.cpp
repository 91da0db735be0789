#include "kpeaks/fields/cross_terms.hpp"

#include <cmath>
#include <numbers>

#include "kpeaks/core/error.hpp"
#include "kpeaks/core/fit.hpp"
#include "kpeaks/core/gauss.hpp"
#include "kpeaks/fields/spherical.hpp"

namespace kpeaks::fields {

namespace {

/// Composite Gauss nodes on [a, b] with panels no wider than \p panel.
QuadratureRule
panels_on(double a, double b, double panel, int order)
{
    int n = std::max(1, static_cast<int>(std::ceil((b - a) / panel - 1e-12)));
    return composite_gauss(a, b, n, order);
}

/// (2 pi / D) int_0^inf f(r) r int_{|D-r|}^{D+r} g(s) s ds dr in peak units.
double
bipolar(const radial::RadialProfile& f, const radial::RadialProfile& g, double D)
{
    constexpr int order = 8;
    double Rf = f.radius_below(1e-18);
    double Rg = g.radius_below(1e-18);
    double pf = 0.5 / f.tail().rate;
    double pg = 0.5 / g.tail().rate;
    auto gs = [&](double s) {
        radial::RadialSample smp = g.sample(s);
        return (smp.value - smp.laplacian) * s;
    };
    auto inner = [&](double r) {
        double lo = std::abs(D - r);
        double hi = std::min(D + r, Rg);
        if (lo >= hi) {
            return 0.0;
        }
        QuadratureRule q = panels_on(lo, hi, pg, order);
        double acc = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) {
            acc += q.weights[k] * gs(q.nodes[k]);
        }
        return acc;
    };
    // Break the outer range at r = D, where |D - r| has its kink, and skip radii where the
    // inner interval misses the support of g.
    double r_lo = std::max(0.0, D - Rg);
    double r_hi = std::min(Rf, D + Rg);
    if (r_lo >= r_hi) {
        return 0.0;
    }
    std::vector<double> breaks{r_lo};
    if (D > r_lo && D < r_hi) {
        breaks.push_back(D);
    }
    breaks.push_back(r_hi);
    double acc = 0.0;
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
        QuadratureRule q = panels_on(breaks[b], breaks[b + 1], std::min(pf, pg), order);
        for (std::size_t k = 0; k < q.size(); ++k) {
            double r = q.nodes[k];
            acc += q.weights[k] * f.value(r) * r * inner(r);
        }
    }
    return 2.0 * std::numbers::pi / D * acc;
}

} // namespace

CrossTerms
cross_terms(const AnsatzState& state)
{
    PeakSet peaks = assemble_ansatz(state);
    double eps = state.eps;
    std::size_t k = peaks.size();
    CrossTerms out;
    out.eps = eps;
    out.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    SphericalSettings s;
    for (std::size_t i = 0; i < k; ++i) {
        const auto& prof = peaks.profiles()[i];
        double R = eps * prof.radius_below(1e-12);
        double panel = 0.5 * peaks.decay_length(i);
        auto v = integrate_ball<1>(peaks.centers()[i], R, panel, s, [&](const Vec3& x) {
            FieldSample f = peaks.eval_peak(i, x);
            return std::array<double, 1>{eps * eps * dot(f.grad, f.grad) + f.value * f.value};
        });
        out.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = v[0];
    }
    double e3 = eps * eps * eps;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            double D = distance(peaks.centers()[i], peaks.centers()[j]) / eps;
            double m = e3 * bipolar(peaks.profiles()[i], peaks.profiles()[j], D);
            out.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m;
            out.matrix(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = m;
        }
    }
    return out;
}

double
fit_exponential_rate(double eps1, double m1, double eps2, double m2)
{
    require(eps1 != eps2 && m1 > 0.0 && m2 > 0.0, "rate fit needs two distinct scales with positive entries");
    return std::log(m1 / m2) / (1.0 / eps2 - 1.0 / eps1);
}

CrossTermScan
cross_term_scan(const AnsatzState& state, const std::vector<double>& eps_list)
{
    require(eps_list.size() >= 2, "cross-term scan needs at least two eps values");
    CrossTermScan out;
    for (double e : eps_list) {
        AnsatzState s = state;
        s.eps = e;
        out.terms.push_back(cross_terms(s));
    }
    std::size_t k = state.Y.size();
    std::size_t n = eps_list.size();
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            std::vector<double> m;
            for (const auto& t : out.terms) {
                m.push_back(t.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            }
            out.loglog_slope.push_back(fit_loglog_slope(eps_list, m));
            out.rate.push_back(fit_exponential_rate(eps_list[n - 2], m[n - 2], eps_list[n - 1], m[n - 1]));
        }
    }
    return out;
}

} // namespace kpeaks::fields
