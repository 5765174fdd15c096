#include "mupf/linalg.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace mupf {

Mat6 repair_psd(const Mat6& m) {
  const Mat6 sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat6> es(sym);
  const double min_ev = es.eigenvalues().minCoeff();
  if (min_ev >= 0.0) return sym;
  if (min_ev >= -1e-10) {
    const Vec6 ev = es.eigenvalues().cwiseMax(0.0);
    Mat6 out = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    return 0.5 * (out + out.transpose());
  }
  Mat6 out = sym;
  out.diagonal().array() -= min_ev;
  return out;
}

Gaussian6::Gaussian6(const Vec6& mean, const Mat6& cov) : mean_(mean) {
  Eigen::SelfAdjointEigenSolver<Mat6> es(0.5 * (cov + cov.transpose()));
  const Vec6 ev = es.eigenvalues().cwiseMax(kVarianceFloor);
  const Mat6& v = es.eigenvectors();
  whiten_ = ev.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
  // Sampling uses the unfloored spectrum: a zero covariance samples the mean.
  colorize_ = v * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * v.transpose();
  log_norm_ = -0.5 * (6.0 * std::log(2.0 * std::numbers::pi) + ev.array().log().sum());
}

double Gaussian6::log_pdf(const Vec6& x) const {
  return log_norm_ - 0.5 * (whiten_ * (x - mean_)).squaredNorm();
}

Vec6 Gaussian6::transform_standard(const Vec6& standard_normal) const {
  return mean_ + colorize_ * standard_normal;
}

}  // namespace mupf
