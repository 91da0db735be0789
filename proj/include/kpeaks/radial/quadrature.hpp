#pragma once

#include <functional>

#include "kpeaks/radial/profile.hpp"

namespace kpeaks::radial {

/// Integrand f(r, sample) of a radially symmetric quantity.
using RadialIntegrand = std::function<double(double, const RadialSample&)>;

/// 4 pi * integral_0^inf f(r, u(r)) r^2 dr: Gauss-Legendre on every grid interval of the
/// Hermite interpolant plus panels over the analytic tail.
double radial_integral(const RadialProfile& profile, const RadialIntegrand& f);

/// Integral of |grad u|^2 over R^3.
double grad_norm_sq(const RadialProfile& profile);

/// Integral of |u|^q over R^3.
double lp_norm_pow(const RadialProfile& profile, double q);

} // namespace kpeaks::radial
