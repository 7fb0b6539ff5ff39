#include "random_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "util.hpp"

namespace mlqmc {

namespace {

void check_params(const MaternParams& p) {
    if (!(p.nu > 0.0) || !std::isfinite(p.nu) || !(p.lambda > 0.0) ||
        !std::isfinite(p.lambda) || !(p.sigma2 > 0.0) || !std::isfinite(p.sigma2))
        fail(ErrorKind::input, "Matern parameters must be positive and finite");
}

// Columns compare entrywise; the first differing entry decides.
bool column_less(const Eigen::MatrixXd& m, int a, int b) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (m(i, a) < m(i, b)) return true;
        if (m(i, a) > m(i, b)) return false;
    }
    return false;
}

} // namespace

double matern_covariance(const MaternParams& params, double r) {
    check_params(params);
    if (!(r >= 0.0) || !std::isfinite(r))
        fail(ErrorKind::input, "Matern covariance needs a finite distance");
    if (r == 0.0)
        return params.sigma2;
    const double x = std::sqrt(2.0 * params.nu) * r / params.lambda;
    const double scale =
        std::pow(2.0, 1.0 - params.nu) / std::tgamma(params.nu);
    const double k = std::cyl_bessel_k(params.nu, x);
    return params.sigma2 * scale * std::pow(x, params.nu) * k;
}

double matern_covariance(const MaternParams& params, const std::array<double, 2>& x,
                         const std::array<double, 2>& y) {
    if (!std::isfinite(x[0]) || !std::isfinite(x[1]) || !std::isfinite(y[0]) ||
        !std::isfinite(y[1]))
        fail(ErrorKind::input, "Matern covariance needs finite coordinates");
    return matern_covariance(params, std::hypot(x[0] - y[0], x[1] - y[1]));
}

KLBasis kl_decompose(const GlobalPointSet& points, const MaternParams& params,
                     int s, double mean) {
    check_params(params);
    const int n = static_cast<int>(points.coords.size());
    if (n < 1)
        fail(ErrorKind::config, "decomposition needs at least one point");
    if (s < 1 || s > n)
        fail(ErrorKind::config, "stochastic dimension " + std::to_string(s) +
                                    " outside [1, " + std::to_string(n) + "]");

    Eigen::MatrixXd c(n, n);
    for (int i = 0; i < n; ++i) {
        c(i, i) = params.sigma2;
        for (int j = 0; j < i; ++j) {
            double v = matern_covariance(params, points.coords[i], points.coords[j]);
            c(i, j) = v;
            c(j, i) = v;
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c);
    if (solver.info() != Eigen::Success)
        fail(ErrorKind::numeric, "eigendecomposition failed on a " +
                                     std::to_string(n) + "x" + std::to_string(n) +
                                     " covariance matrix");

    KLBasis basis;
    basis.npoints = n;
    basis.s = s;
    basis.mean = mean;
    basis.trace = static_cast<double>(n) * params.sigma2;

    // Anything slightly negative is rounding; anything beyond the tolerance
    // means the kernel itself is broken.
    const double floor = -1e-10 * basis.trace;
    if (solver.eigenvalues()(0) < floor)
        fail(ErrorKind::numeric, "covariance matrix is indefinite");

    basis.eigenvalues.resize(s);
    basis.eigenvectors.resize(n, s);
    for (int m = 0; m < s; ++m) {
        double theta = solver.eigenvalues()(n - 1 - m); // solver sorts ascending
        basis.eigenvalues(m) = theta < 0.0 ? 0.0 : theta;
        basis.eigenvectors.col(m) = solver.eigenvectors().col(n - 1 - m);
    }

    // Canonical signs: first appreciable entry of each column positive.
    for (int m = 0; m < s; ++m) {
        for (int i = 0; i < n; ++i) {
            double v = basis.eigenvectors(i, m);
            if (std::abs(v) > 1e-10) {
                if (v < 0.0) basis.eigenvectors.col(m) = -basis.eigenvectors.col(m);
                break;
            }
        }
    }

    // Inside a degenerate cluster the solver's column order is arbitrary;
    // fix it lexicographically so repeated decompositions agree.
    const double cluster_tol = 1e-10 * basis.trace;
    int lo = 0;
    while (lo < s) {
        int hi = lo + 1;
        while (hi < s &&
               basis.eigenvalues(hi - 1) - basis.eigenvalues(hi) <= cluster_tol)
            ++hi;
        if (hi - lo > 1) {
            std::vector<int> order(hi - lo);
            for (int i = 0; i < hi - lo; ++i) order[i] = lo + i;
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                return column_less(basis.eigenvectors, a, b);
            });
            Eigen::MatrixXd cols(n, hi - lo);
            Eigen::VectorXd vals(hi - lo);
            for (int i = 0; i < hi - lo; ++i) {
                cols.col(i) = basis.eigenvectors.col(order[i]);
                vals(i) = basis.eigenvalues(order[i]);
            }
            basis.eigenvectors.middleCols(lo, hi - lo) = cols;
            basis.eigenvalues.segment(lo, hi - lo) = vals;
        }
        lo = hi;
    }

    basis.captured_ratio = basis.eigenvalues.sum() / basis.trace;
    return basis;
}

Eigen::VectorXd sample_gaussian(const KLBasis& basis, const Eigen::VectorXd& xi) {
    if (xi.size() != basis.s)
        fail(ErrorKind::input, "coefficient vector has dimension " +
                                   std::to_string(xi.size()) + ", basis has " +
                                   std::to_string(basis.s));
    Eigen::VectorXd scaled = basis.eigenvalues.cwiseSqrt().cwiseProduct(xi);
    Eigen::VectorXd values =
        (basis.eigenvectors * scaled).array() + basis.mean;
    if (!values.allFinite())
        fail(ErrorKind::numeric, "field sample is not finite");
    return values;
}

Eigen::VectorXd sample_lognormal(const KLBasis& basis, const Eigen::VectorXd& xi) {
    Eigen::VectorXd values = sample_gaussian(basis, xi).array().exp();
    if (!values.allFinite())
        fail(ErrorKind::numeric, "lognormal field sample overflowed");
    return values;
}

GaussianMoments lognormal_moments_to_gaussian(double mean, double stddev) {
    if (!(mean > 0.0) || !std::isfinite(mean) || !(stddev >= 0.0) ||
        !std::isfinite(stddev))
        fail(ErrorKind::config, "lognormal moments must be positive and finite");
    const double ratio = stddev / mean;
    const double sigma2 = std::log1p(ratio * ratio);
    return {std::log(mean) - 0.5 * sigma2, sigma2};
}

void dump_spectrum_csv(std::ostream& os, const KLBasis& basis) {
    os << "n,theta_n,cumulative_ratio\n";
    char buf[96];
    double cum = 0.0;
    for (int m = 0; m < basis.s; ++m) {
        cum += basis.eigenvalues(m);
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", m + 1,
                      basis.eigenvalues(m), cum / basis.trace);
        os << buf;
    }
}

std::shared_ptr<const KLBasis> KlCache::get(const GlobalPointSet& points,
                                            const MaternParams& params, int s,
                                            double mean) {
    for (const Entry& e : entries_) {
        if (e.s == s && e.mean == mean && e.params.nu == params.nu &&
            e.params.lambda == params.lambda && e.params.sigma2 == params.sigma2 &&
            e.coords == points.coords)
            return e.basis;
    }
    auto basis = std::make_shared<const KLBasis>(kl_decompose(points, params, s, mean));
    entries_.push_back({points.coords, params, s, mean, basis});
    return basis;
}

} // namespace mlqmc
