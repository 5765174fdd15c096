#pragma once

#include "mupf/geometry.hpp"

namespace mupf {

/// Symmetrizes, then lifts eigenvalues below zero. A matrix whose smallest
/// eigenvalue is within -1e-10 of zero is only symmetrized and clamped at 0.
Mat6 repair_psd(const Mat6& m);

/// Gaussian N(mean, cov) in 6-D with eigenvalues floored at `kVarianceFloor`
/// so the log-density stays finite for near-singular covariances.
class Gaussian6 {
 public:
  static constexpr double kVarianceFloor = 1e-12;

  Gaussian6(const Vec6& mean, const Mat6& cov);

  double log_pdf(const Vec6& x) const;
  const Vec6& mean() const { return mean_; }

  /// mean + cov^{1/2} * standard_normal (symmetric square root).
  Vec6 transform_standard(const Vec6& standard_normal) const;

 private:
  Vec6 mean_;
  Mat6 whiten_;    // x -> cov^{-1/2} (x - mean)
  Mat6 colorize_;  // z -> cov^{1/2} z
  double log_norm_ = 0.0;
};

}  // namespace mupf
