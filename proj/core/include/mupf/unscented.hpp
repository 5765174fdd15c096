#pragma once

#include <Eigen/Core>

namespace mupf {

/// Scaled unscented transformation parameters.
struct SutParams {
  double alpha = 1.0;
  double k = 2.0;
  double beta = 30.0;

  double lambda(int n) const { return alpha * alpha * (n + k) - n; }

  /// Throws Error{InvalidConfig} unless alpha > 0, k >= 0 and n + lambda > 0.
  void validate(int n) const;
};

/// 2n+1 sigma points stored column-wise with separate mean and covariance
/// weights. Columns i and i+n (i = 1..n) mirror each other about column 0.
struct SigmaPointSet {
  Eigen::MatrixXd points;
  Eigen::VectorXd w_mean;
  Eigen::VectorXd w_cov;

  int dim() const { return static_cast<int>(points.rows()); }
  int size() const { return static_cast<int>(points.cols()); }
};

struct UnscentedMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  Eigen::MatrixXd cross_cov;  // state x output
};

/// Lower Cholesky factor of `m`. On failure a diagonal jitter of
/// 1e-12 * trace/n is added and grown tenfold up to 1e-6 * trace/n; past that
/// throws Error{NotPositiveDefinite}. The zero matrix yields a zero factor.
Eigen::MatrixXd robust_cholesky(const Eigen::MatrixXd& m);

SigmaPointSet make_sigma_points(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                const SutParams& params);

/// Pushes every sigma point through `g` and rebuilds the moments: means use
/// `w_mean`, covariance and cross-covariance use `w_cov`. The covariance is
/// symmetrized on return.
template <typename Map>
UnscentedMoments propagate(const SigmaPointSet& set, Map&& g) {
  const int count = set.size();
  Eigen::VectorXd first = g(Eigen::VectorXd(set.points.col(0)));
  Eigen::MatrixXd ys(first.size(), count);
  ys.col(0) = first;
  for (int i = 1; i < count; ++i) ys.col(i) = g(Eigen::VectorXd(set.points.col(i)));

  const Eigen::VectorXd x_mean = set.points.col(0);
  UnscentedMoments out;
  out.mean = ys * set.w_mean;
  out.cov = Eigen::MatrixXd::Zero(ys.rows(), ys.rows());
  out.cross_cov = Eigen::MatrixXd::Zero(set.dim(), ys.rows());
  for (int i = 0; i < count; ++i) {
    const Eigen::VectorXd dy = ys.col(i) - out.mean;
    const Eigen::VectorXd dx = set.points.col(i) - x_mean;
    out.cov.noalias() += set.w_cov[i] * dy * dy.transpose();
    out.cross_cov.noalias() += set.w_cov[i] * dx * dy.transpose();
  }
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

}  // namespace mupf
