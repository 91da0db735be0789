#pragma once

#include <vector>

namespace kpeaks {

/// Least-squares slope of log|y| against log x.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Least-squares line y = intercept + slope x.
struct LineFit
{
    double slope;
    double intercept;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

} // namespace kpeaks
