#pragma once

#include <vector>

#include <Eigen/Dense>

#include "kpeaks/fields/ansatz.hpp"

namespace kpeaks::fields {

/// M_ij = int (eps^2 grad w^i_{eps,y^i} . grad w^j_{eps,y^j} + w^i w^j) for one eps.
struct CrossTerms
{
    double eps = 0.0;
    Eigen::MatrixXd matrix;
};

/// Diagonal entries by the product rule in x, off-diagonal entries by the bipolar reduction
///   int f(|z|) g(|z - D e|) dz = (2 pi / D) int_0^inf f(r) r int_{|D-r|}^{D+r} g(s) s ds dr
/// with f = w^i and g = w^j - Delta w^j in peak units (the gradient term integrated by parts).
CrossTerms cross_terms(const AnsatzState& state);

/// gamma in M(eps) ~ exp(-gamma / eps) from two scales: log(M1 / M2) / (1/eps2 - 1/eps1).
double fit_exponential_rate(double eps1, double m1, double eps2, double m2);

/// Off-diagonal entries for each eps with the log-log slope and exponential rate per pair.
struct CrossTermScan
{
    std::vector<CrossTerms> terms;
    /// Per pair (i < j, row-major order): slope of log M_ij against log eps.
    std::vector<double> loglog_slope;
    /// Per pair: exponential rate fitted from the two smallest eps.
    std::vector<double> rate;
};

CrossTermScan cross_term_scan(const AnsatzState& state, const std::vector<double>& eps_list);

} // namespace kpeaks::fields
