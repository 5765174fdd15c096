#include "mupf/unscented.hpp"

#include <Eigen/Cholesky>

#include "mupf/error.hpp"

namespace mupf {

void SutParams::validate(int n) const {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidConfig, "SUT alpha must be > 0");
  if (!(k >= 0.0)) throw Error(ErrorCode::InvalidConfig, "SUT k must be >= 0");
  if (!(n + lambda(n) > 0.0)) throw Error(ErrorCode::InvalidConfig, "SUT requires n + lambda > 0");
}

Eigen::MatrixXd robust_cholesky(const Eigen::MatrixXd& m) {
  const auto n = m.rows();
  if (m.isZero(0.0)) return Eigen::MatrixXd::Zero(n, n);

  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  const double scale = std::abs(m.trace()) / static_cast<double>(n);
  for (double jitter = 1e-12; jitter <= 1e-6 * (1.0 + 1e-9); jitter *= 10.0) {
    Eigen::MatrixXd shifted = m;
    shifted.diagonal().array() += jitter * scale;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw Error(ErrorCode::NotPositiveDefinite, "Cholesky failed after jitter escalation");
}

SigmaPointSet make_sigma_points(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                const SutParams& params) {
  const int n = static_cast<int>(mean.size());
  params.validate(n);
  const double lambda = params.lambda(n);
  const double spread = n + lambda;

  const Eigen::MatrixXd root = robust_cholesky(spread * cov);

  SigmaPointSet set;
  set.points.resize(n, 2 * n + 1);
  set.points.col(0) = mean;
  for (int i = 0; i < n; ++i) {
    set.points.col(1 + i) = mean + root.col(i);
    set.points.col(1 + n + i) = mean - root.col(i);
  }
  set.w_mean = Eigen::VectorXd::Constant(2 * n + 1, 1.0 / (2.0 * spread));
  set.w_cov = set.w_mean;
  set.w_mean[0] = lambda / spread;
  set.w_cov[0] = lambda / spread + (1.0 - params.alpha * params.alpha + params.beta);
  return set;
}

}  // namespace mupf
