#include "mupf/upf.hpp"

#include <cmath>
#include <limits>

#include "mupf/error.hpp"
#include "mupf/linalg.hpp"
#include "mupf/rng.hpp"

namespace mupf {

StepDiagnostics upf_step(FilterState& state, const Vec3& y, const MeasurementModel& model,
                         const FilterConfig& config) {
  const std::size_t n = state.particles.size();
  if (n == 0) throw Error(ErrorCode::InvalidConfig, "filter state has no particles");
  state.t += 1;
  const std::size_t t = state.t;
  state.history.assign(1, {t, y});
  const Mat3 r = config.measurement_noise();

  // 1) UKF prediction and correction, 2) proposal draw and weight
  //    w_t = w_{t-1} * l(y_t | x_hat) * [phi(x_hat | x_pred)] / q(x_hat)
  std::vector<Vec6> x_hat(n);
  std::vector<Mat6> p_corr(n);
  std::vector<double> log_w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Particle& p = state.particles[i];
    const UkfResult corrected = ukf_step(p, y, model, config.q, r, config.sut);
    const Gaussian6 proposal(corrected.mean, corrected.cov);

    auto rng = make_rng(config.seed, t, i, RngStream::Proposal);
    std::normal_distribution<double> nd(0.0, 1.0);
    Vec6 z;
    for (int k = 0; k < 6; ++k) z[k] = nd(rng);
    x_hat[i] = proposal.transform_standard(z);

    const double ll = model.log_likelihood(y, Pose::from_vector(x_hat[i]));
    double lw = std::log(p.weight) + ll - proposal.log_pdf(x_hat[i]);
    if (config.transition_density) lw += Gaussian6(p.mean, config.q).log_pdf(x_hat[i]);
    log_w[i] = lw;
    p_corr[i] = corrected.cov;
  }

  double hi = -std::numeric_limits<double>::infinity();
  for (double v : log_w) {
    if (!std::isnan(v)) hi = std::max(hi, v);
  }
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  StepDiagnostics diag;
  diag.t = t;
  if (std::isfinite(hi)) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = std::isnan(log_w[i]) ? 0.0 : std::exp(log_w[i] - hi);
      sum += w[i];
    }
    for (double& v : w) v /= sum;
  } else {
    diag.degenerate_recovered = true;
  }
  double sq = 0.0;
  for (double v : w) sq += v * v;
  diag.effective_sample_size = 1.0 / sq;

  // 3) resampling at every step
  auto rng = make_rng(config.seed, t, 0, RngStream::Resample);
  const auto parents = resample_indices(w, config.resampling, rng);
  std::vector<Particle> next(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = parents[i];
    next[i] = {1.0 / static_cast<double>(n), x_hat[j], p_corr[j], x_hat[j]};
  }
  state.particles = std::move(next);
  diag.resampled = true;
  return diag;
}

}  // namespace mupf
