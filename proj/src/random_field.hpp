#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <memory>
#include <vector>

#include "point_selection.hpp"

namespace mlqmc {

struct MaternParams {
    double nu = 2.0;      // smoothness
    double lambda = 0.3;  // correlation length, meters
    double sigma2 = 1.0;  // field variance
};

double matern_covariance(const MaternParams& params, double r);
double matern_covariance(const MaternParams& params, const std::array<double, 2>& x,
                         const std::array<double, 2>& y);

// Discrete spectral basis of the covariance matrix on a fixed point set.
// Eigenvalues are sorted descending; eigenvector signs and the order inside
// degenerate clusters are canonicalized so decompositions are reproducible.
struct KLBasis {
    int npoints = 0;
    int s = 0;                  // retained modes
    double mean = 0.0;          // constant spatial mean of the Gaussian field
    double trace = 0.0;         // npoints * sigma2
    double captured_ratio = 0.0; // sum of retained eigenvalues over trace
    Eigen::VectorXd eigenvalues; // size s
    Eigen::MatrixXd eigenvectors; // npoints x s, orthonormal columns
};

KLBasis kl_decompose(const GlobalPointSet& points, const MaternParams& params,
                     int s, double mean);

// mean + sum_n sqrt(theta_n) xi_n b_n, one value per point.
Eigen::VectorXd sample_gaussian(const KLBasis& basis, const Eigen::VectorXd& xi);
Eigen::VectorXd sample_lognormal(const KLBasis& basis, const Eigen::VectorXd& xi);

// Gaussian parameters whose exponential has the requested first two
// moments: sigma2 = ln(1 + (stddev/mean)^2), mean_g = ln(mean) - sigma2/2.
struct GaussianMoments {
    double mean;
    double sigma2;
};
GaussianMoments lognormal_moments_to_gaussian(double mean, double stddev);

void dump_spectrum_csv(std::ostream& os, const KLBasis& basis);

// Decompositions keyed by point-set content and parameters, so plans that
// share a point set (and repeated runs) reuse the same eigenpairs.
class KlCache {
public:
    std::shared_ptr<const KLBasis> get(const GlobalPointSet& points,
                                       const MaternParams& params, int s,
                                       double mean);

private:
    struct Entry {
        std::vector<std::array<double, 2>> coords;
        MaternParams params;
        int s;
        double mean;
        std::shared_ptr<const KLBasis> basis;
    };
    std::vector<Entry> entries_;
};

} // namespace mlqmc
