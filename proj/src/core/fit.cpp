#include "kpeaks/core/fit.hpp"

#include <cmath>

#include "kpeaks/core/error.hpp"

namespace kpeaks {

LineFit
fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    require(x.size() == y.size() && x.size() >= 2, "line fit needs at least two points");
    double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    require(sxx > 0.0, "line fit needs distinct abscissae");
    double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

double
fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(std::abs(y[i])));
    }
    return fit_line(lx, ly).slope;
}

} // namespace kpeaks
