#include "kpeaks/core/fd.hpp"

#include "kpeaks/core/error.hpp"

namespace kpeaks {

std::vector<double>
fd_weights(double x0, const std::vector<double>& nodes, int order)
{
    int n = static_cast<int>(nodes.size());
    require(n > order, "not enough nodes for the requested derivative");
    // c[j][k]: weight of node j for derivative k.
    std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        int mn = std::min(i, order);
        double c2 = 1.0;
        double c5 = c4;
        c4 = nodes[i] - x0;
        for (int j = 0; j < i; ++j) {
            double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) {
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int j = 0; j < n; ++j) {
        w[j] = c[j][order];
    }
    return w;
}

} // namespace kpeaks
