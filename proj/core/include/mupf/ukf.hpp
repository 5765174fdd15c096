#pragma once

#include <Eigen/Cholesky>

#include "mupf/error.hpp"
#include "mupf/geometry.hpp"
#include "mupf/linalg.hpp"
#include "mupf/measurement.hpp"
#include "mupf/unscented.hpp"

namespace mupf {

/// Weighted Gaussian atom of the particle population.
struct Particle {
  double weight = 0.0;
  Vec6 mean = Vec6::Zero();  // x_{t|t}
  Mat6 cov = Mat6::Zero();   // P_{t|t}
  Vec6 sampled = Vec6::Zero();  // latest draw from the proposal
};

struct UkfResult {
  Vec6 mean;  // corrected mean, centre of the proposal
  Mat6 cov;   // corrected covariance, PSD-repaired
};

/// Kalman correction of (mean, cov) against measurement y, with the
/// predicted measurement obtained by pushing sigma points through `h`.
template <typename MeasurementMap>
UkfResult ukf_correct(const Vec6& mean, const Mat6& cov, const Vec3& y, const Mat3& r,
                      const SutParams& sut, MeasurementMap&& h) {
  const SigmaPointSet sigma = make_sigma_points(mean, cov, sut);
  const UnscentedMoments m = propagate(sigma, [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return h(Vec6(x));
  });

  const Mat3 s = m.cov + r;
  const Eigen::Matrix<double, 6, 3> gamma = m.cross_cov;
  Eigen::LLT<Mat3> llt(0.5 * (s + s.transpose()));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularInnovation, "innovation covariance is not positive definite");
  }
  // K = Gamma S^{-1}, computed as (S^{-1} Gamma^T)^T.
  const Eigen::Matrix<double, 6, 3> gain = llt.solve(gamma.transpose()).transpose();
  if (!gain.allFinite()) throw Error(ErrorCode::SingularInnovation, "non-finite Kalman gain");

  UkfResult out;
  out.mean = mean + gain * (y - Vec3(m.mean));
  out.cov = repair_psd(cov - gain * s * gain.transpose());
  return out;
}

/// Time update (P + Q, identity dynamics) followed by the unscented
/// correction against the proximity measurement function.
UkfResult ukf_step(const Particle& particle, const Vec3& y, const MeasurementModel& model,
                   const Mat6& q, const Mat3& r, const SutParams& sut);

}  // namespace mupf
