#include <algorithm>
#include <cmath>
#include <numbers>

#include "kpeaks/core/error.hpp"
#include "kpeaks/core/format.hpp"
#include "kpeaks/core/gauss.hpp"
#include "kpeaks/spectral/spectral.hpp"

namespace kpeaks::spectral {

namespace {

/// Derivative matrix D(k, j) = l_j'(xi_k) of the Lagrange basis on Gauss-Lobatto-Legendre nodes.
Eigen::MatrixXd
gll_derivative(const std::vector<double>& xi, int order)
{
    int n = order + 1;
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> pn(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        double dp = 0.0;
        legendre(order, xi[static_cast<std::size_t>(k)], pn[static_cast<std::size_t>(k)], dp);
    }
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            if (k != j) {
                D(k, j) = pn[static_cast<std::size_t>(k)] /
                          (pn[static_cast<std::size_t>(j)] * (xi[static_cast<std::size_t>(k)] - xi[static_cast<std::size_t>(j)]));
            }
        }
    }
    D(0, 0) = -0.25 * order * (order + 1);
    D(order, order) = 0.25 * order * (order + 1);
    return D;
}

} // namespace

Eigen::VectorXd
RadialOperatorMatrix::apply(const Eigen::VectorXd& chi) const
{
    return (stiffness * chi).cwiseQuotient(mass);
}

double
RadialOperatorMatrix::inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const
{
    return (mass.array() * x.array() * y.array()).sum();
}

double
RadialOperatorMatrix::norm(const Eigen::VectorXd& x) const
{
    return std::sqrt(inner(x, x));
}

RadialOperatorMatrix
build_lplus_radial(const limit::LimitSystemSolution& limit, std::size_t well, int ell,
                   const RadialOperatorOptions& options)
{
    require(well < limit.size(), "well index out of range");
    require(ell >= 0, "angular mode must be non-negative");
    require(options.order >= 2 && options.element_width > 0.0, "invalid spectral element settings");
    const auto& w = limit.w_profiles[well];
    double c = limit.c;
    double lambda = limit.wells[well].value;
    double p = limit.params.p;
    double R = w.radius_below(options.truncation);
    double width = options.element_width * std::sqrt(c / lambda);
    int elements = std::max(1, static_cast<int>(std::ceil(R / width)));
    double he = R / elements;
    double J = 0.5 * he;

    int N = options.order;
    QuadratureRule gll = gauss_lobatto(N + 1);
    Eigen::MatrixXd D = gll_derivative(gll.nodes, N);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (int q = 0; q <= N; ++q) {
        local += (c * gll.weights[static_cast<std::size_t>(q)] / J) * D.row(q).transpose() * D.row(q);
    }

    // Global nodes 0 .. elements * N; the first (r = 0) and the last (r = R) carry Dirichlet zeros.
    int total = elements * N + 1;
    int n = total - 2;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r(n);
    double l2 = static_cast<double>(ell) * (ell + 1);
    for (int e = 0; e < elements; ++e) {
        double left = e * he;
        for (int a = 0; a <= N; ++a) {
            int ga = e * N + a - 1;
            if (ga < 0 || ga >= n) {
                continue;
            }
            double ra = left + J * (gll.nodes[static_cast<std::size_t>(a)] + 1.0);
            r(ga) = ra;
            double wq = gll.weights[static_cast<std::size_t>(a)] * J;
            mass(ga) += wq;
            double u = w.value(ra);
            double pot = c * l2 / (ra * ra) + lambda - p * std::pow(std::max(u, 0.0), p - 1.0);
            K(ga, ga) += wq * pot;
            for (int b = 0; b <= N; ++b) {
                int gb = e * N + b - 1;
                if (gb >= 0 && gb < n) {
                    K(ga, gb) += local(a, b);
                }
            }
        }
    }
    // The angular mean of Y_lm vanishes for ell >= 1, so int grad w . grad phi = 0 there.
    if (options.include_nonlocal && ell == 0 && limit.params.b != 0.0) {
        Eigen::VectorXd gv(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            gv(k) = mass(k) * r(k) * (-w.laplacian(r(k)));
        }
        K += (8.0 * std::numbers::pi * limit.params.b) * gv * gv.transpose();
    }
    RadialOperatorMatrix out;
    out.ell = ell;
    out.well = well;
    out.r = std::move(r);
    out.mass = std::move(mass);
    out.stiffness = 0.5 * (K + K.transpose());
    return out;
}

EigenPairs
smallest_eigenpairs(const RadialOperatorMatrix& matrix, int count)
{
    require(count > 0, "eigenpair count must be positive");
    Eigen::VectorXd s = matrix.mass.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd C = s.asDiagonal() * matrix.stiffness * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(C);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::NoConvergence, "symmetric eigensolver failed for ell = " + std::to_string(matrix.ell) +
                                                  " (" + std::to_string(C.rows()) + " unknowns)");
    }
    const auto& values = solver.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        order[static_cast<std::size_t>(i)] = i;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index x, Eigen::Index y) { return std::abs(values(x)) < std::abs(values(y)); });
    EigenPairs out;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        out.negative_count += values(i) < 0.0 ? 1 : 0;
    }
    int m = std::min<int>(count, static_cast<int>(values.size()));
    for (int i = 0; i < m; ++i) {
        Eigen::Index idx = order[static_cast<std::size_t>(i)];
        out.values.push_back(values(idx));
        out.vectors.push_back(s.asDiagonal() * solver.eigenvectors().col(idx));
    }
    return out;
}

NondegeneracyReport
nondegeneracy_report(const limit::LimitSystemSolution& limit, std::size_t well, const std::vector<int>& ells, int count,
                     const RadialOperatorOptions& options)
{
    require(std::find(ells.begin(), ells.end(), 1) != ells.end(), "the translation mode ell = 1 must be scanned");
    require(count >= 2, "at least two eigenpairs per mode are needed");
    NondegeneracyReport out;
    out.well = well;
    for (int ell : ells) {
        auto M = build_lplus_radial(limit, well, ell, options);
        ModeSpectrum mode;
        mode.ell = ell;
        mode.pairs = smallest_eigenpairs(M, count);
        if (ell == 1) {
            out.scale = std::abs(mode.pairs.values[1]);
            Eigen::VectorXd t(M.size());
            for (Eigen::Index k = 0; k < M.size(); ++k) {
                t(k) = M.r(k) * limit.w_profiles[well].deriv(M.r(k));
            }
            out.translation_residual = M.norm(M.apply(t)) / M.norm(t);
            const auto& v = mode.pairs.vectors[0];
            out.kernel_cosine = std::abs(M.inner(v, t)) / (M.norm(v) * M.norm(t));
        }
        out.modes.push_back(std::move(mode));
    }
    bool ok = out.kernel_cosine >= 0.999;
    for (auto& mode : out.modes) {
        for (double v : mode.pairs.values) {
            mode.kernel_count += std::abs(v) <= out.kernel_tol * out.scale ? 1 : 0;
        }
        ok = ok && mode.kernel_count == (mode.ell == 1 ? 1 : 0);
        if (mode.ell == 0) {
            out.radial_gap = std::abs(mode.pairs.values[0]) / out.scale;
            ok = ok && out.radial_gap >= 0.01;
        } else if (mode.ell >= 2) {
            ok = ok && mode.pairs.negative_count == 0;
        }
    }
    out.passed = ok;
    return out;
}

void
write_spectrum_csv(const std::vector<NondegeneracyReport>& reports, const std::filesystem::path& path)
{
    auto f = open_output(path);
    f << "well,ell,eigenvalue_rank,eigenvalue,kernel_flag\n";
    for (const auto& rep : reports) {
        for (const auto& mode : rep.modes) {
            for (std::size_t i = 0; i < mode.pairs.values.size(); ++i) {
                double v = mode.pairs.values[i];
                f << rep.well << ',' << mode.ell << ',' << i << ',' << fmt17(v) << ','
                  << (std::abs(v) <= rep.kernel_tol * rep.scale ? 1 : 0) << '\n';
            }
        }
    }
}

} // namespace kpeaks::spectral
