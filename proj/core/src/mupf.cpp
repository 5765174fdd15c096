#include "mupf/mupf.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

#include "mupf/error.hpp"
#include "mupf/linalg.hpp"
#include "mupf/rng.hpp"
#include "parallel.hpp"

namespace mupf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Vec6 standard_normal(std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec6 z;
  for (int k = 0; k < 6; ++k) z[k] = nd(rng);
  return z;
}

double log_sum_exp(std::span<const double> v) {
  double hi = kNegInf;
  for (double x : v) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double x : v) s += std::exp(x - hi);
  return hi + std::log(s);
}

/// Normalizes log-weights in place into linear weights. Returns false when
/// every entry is -inf or NaN.
bool normalize_log_weights(std::span<const double> log_w, std::vector<double>& out) {
  out.assign(log_w.size(), 0.0);
  double hi = kNegInf;
  for (double x : log_w) {
    if (!std::isnan(x)) hi = std::max(hi, x);
  }
  if (!std::isfinite(hi)) return false;
  double sum = 0.0;
  for (std::size_t i = 0; i < log_w.size(); ++i) {
    out[i] = std::isnan(log_w[i]) ? 0.0 : std::exp(log_w[i] - hi);
    sum += out[i];
  }
  for (double& w : out) w /= sum;
  return true;
}

double effective_sample_size(std::span<const double> w) {
  double s = 0.0;
  for (double x : w) s += x * x;
  return s > 0.0 ? 1.0 / s : 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// LikelihoodAudit

void LikelihoodAudit::record_propagated(std::size_t k) {
  std::lock_guard lock(mutex_);
  if (propagated_.size() <= k) propagated_.resize(k + 1, 0);
  ++propagated_[k];
}

void LikelihoodAudit::record_extraction(std::size_t k, double exponent) {
  std::lock_guard lock(mutex_);
  if (extraction_.size() <= k) extraction_.resize(k + 1, 0.0);
  extraction_[k] = exponent;
}

std::size_t LikelihoodAudit::propagated_calls(std::size_t k) const {
  std::lock_guard lock(mutex_);
  return k < propagated_.size() ? propagated_[k] : 0;
}

double LikelihoodAudit::last_extraction_exponent(std::size_t k) const {
  std::lock_guard lock(mutex_);
  return k < extraction_.size() ? extraction_[k] : 0.0;
}

void LikelihoodAudit::reset_extraction() {
  std::lock_guard lock(mutex_);
  extraction_.clear();
}

// ---------------------------------------------------------------------------

MeasurementModel make_model(std::shared_ptr<const TriMesh> mesh, const FilterConfig& config) {
  return MeasurementModel(std::move(mesh), config.likelihood_sigma());
}

FilterState init(const FilterConfig& config) {
  config.validate();
  const std::size_t n = config.particles;
  const Gaussian6 prior(config.x0.to_vector(), config.initial_sampling_cov());

  FilterState state;
  state.particles.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = make_rng(config.seed, 0, i, RngStream::Init);
    Particle& p = state.particles[i];
    p.mean = prior.transform_standard(standard_normal(rng));
    p.sampled = p.mean;
    p.cov = config.p0;
    p.weight = 1.0 / static_cast<double>(n);
  }
  return state;
}

std::vector<std::size_t> resample_indices(std::span<const double> weights, ResamplingScheme scheme,
                                          std::mt19937_64& rng) {
  const std::size_t n = weights.size();
  std::vector<double> cdf(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += weights[i];
    cdf[i] = acc;
  }
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<std::size_t> out(n);
  const double u0 = uni(rng);
  for (std::size_t j = 0; j < n; ++j) {
    const double u = (scheme == ResamplingScheme::Multinomial ? uni(rng) : (u0 + j) / n) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    // Never select a zero-weight tail particle through rounding.
    std::size_t idx = std::min<std::size_t>(it - cdf.begin(), n - 1);
    while (idx > 0 && weights[idx] == 0.0) --idx;
    out[j] = idx;
  }
  return out;
}

StepDiagnostics step(FilterState& state, const Vec3& y, const MeasurementModel& model,
                     const FilterConfig& config, const StepHooks& hooks) {
  const std::size_t n = state.particles.size();
  if (n == 0) throw Error(ErrorCode::InvalidConfig, "filter state has no particles");

  state.t += 1;
  const std::size_t t = state.t;
  state.history.push_back({t, y});
  while (state.history.size() > config.memory) state.history.pop_front();

  const std::size_t window = state.history.size();
  const Mat3 r = config.measurement_noise();

  ProposalSnapshot& snap = state.proposal;
  snap.sampled.assign(n, Vec6::Zero());
  snap.mean.assign(n, Vec6::Zero());
  snap.cov.assign(n, Mat6::Zero());
  snap.log_proposal.assign(n, 0.0);
  snap.log_likelihood.assign(n * window, 0.0);
  snap.window.clear();
  for (const auto& h : state.history) snap.window.push_back(h.index);

  std::vector<double> log_w(n, kNegInf);

  detail::parallel_for(n, config.threads, [&](std::size_t i) {
    const Particle& p = state.particles[i];
    const UkfResult corrected = ukf_step(p, y, model, config.q, r, config.sut);

    auto rng = make_rng(config.seed, t, i, RngStream::Proposal);
    const Gaussian6 proposal(corrected.mean, corrected.cov);
    const Vec6 x_hat = proposal.transform_standard(standard_normal(rng));
    const Pose pose = Pose::from_vector(x_hat);

    double loglik_sum = 0.0;
    for (std::size_t s = 0; s < window; ++s) {
      const auto& m = state.history[s];
      const double ll = model.log_likelihood(m.point, pose);
      if (hooks.audit) hooks.audit->record_propagated(m.index);
      snap.log_likelihood[i * window + s] = ll;
      loglik_sum += ll;
    }
    const double log_q = proposal.log_pdf(x_hat);

    double lw = std::log(p.weight) + loglik_sum - log_q;
    if (config.transition_density) lw += Gaussian6(p.mean, config.q).log_pdf(x_hat);
    log_w[i] = lw;

    snap.sampled[i] = x_hat;
    snap.mean[i] = corrected.mean;
    snap.cov[i] = corrected.cov;
    snap.log_proposal[i] = log_q;
  });

  StepDiagnostics diag;
  diag.t = t;
  if (!normalize_log_weights(log_w, snap.weight)) {
    if (config.on_degenerate == DegeneratePolicy::Throw) {
      throw Error(ErrorCode::DegenerateWeights,
                  "all importance weights vanished at t=" + std::to_string(t));
    }
    spdlog::warn("degenerate importance weights at t={}; resetting to uniform", t);
    snap.weight.assign(n, 1.0 / static_cast<double>(n));
    diag.degenerate_recovered = true;
  }
  diag.effective_sample_size = effective_sample_size(snap.weight);

  const double uniform = 1.0 / static_cast<double>(n);
  std::vector<Particle> next(n);
  if (t > config.t0) {
    auto rng = make_rng(config.seed, t, 0, RngStream::Resample);
    const auto parents = resample_indices(snap.weight, config.resampling, rng);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = parents[i];
      next[i] = {uniform, snap.sampled[j], snap.cov[j], snap.sampled[j]};
    }
    diag.resampled = true;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = {uniform, snap.sampled[i], snap.cov[i], snap.sampled[i]};
    }
  }
  state.particles = std::move(next);
  return diag;
}

std::vector<double> extraction_log_weights(const FilterState& state, const FilterConfig& config,
                                           const StepHooks& hooks) {
  const ProposalSnapshot& snap = state.proposal;
  if (snap.empty()) throw Error(ErrorCode::InvalidConfig, "no measurement processed yet");

  const auto m = static_cast<double>(config.memory);
  const auto t = static_cast<double>(state.t);
  const std::size_t window = snap.window.size();
  std::vector<double> exponents(window);
  for (std::size_t s = 0; s < window; ++s) {
    const auto k = static_cast<double>(snap.window[s]);
    exponents[s] = m - t + k - 1.0;
    if (hooks.audit) hooks.audit->record_extraction(snap.window[s], exponents[s]);
  }

  const std::size_t n = snap.sampled.size();
  std::vector<double> log_w(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t s = 0; s < window; ++s) acc += exponents[s] * snap.loglik(i, s);
    double lw = std::log(snap.weight[i]) + acc;
    if (config.extraction_proposal_correction) lw -= snap.log_proposal[i];
    log_w[i] = lw;
  }
  return log_w;
}

std::pair<std::size_t, double> map_particle(std::span<const Vec6> samples,
                                            std::span<const Mat6> covs,
                                            std::span<const double> weights,
                                            std::size_t threads) {
  const std::size_t n = samples.size();
  std::vector<std::size_t> active;
  std::vector<Gaussian6> kernels;
  std::vector<double> log_weights;
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i] > 0.0) {
      active.push_back(i);
      kernels.emplace_back(samples[i], covs[i]);
      log_weights.push_back(std::log(weights[i]));
    }
  }
  if (active.empty()) throw Error(ErrorCode::DegenerateWeights, "all extraction weights are zero");

  std::vector<double> score(n, kNegInf);
  detail::parallel_for(n, threads, [&](std::size_t j) {
    std::vector<double> terms(active.size());
    for (std::size_t a = 0; a < active.size(); ++a) {
      terms[a] = log_weights[a] + kernels[a].log_pdf(samples[j]);
    }
    score[j] = log_sum_exp(terms);
  });

  std::size_t best = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (score[j] > score[best]) best = j;
  }
  return {best, score[best]};
}

PoseEstimate extract_pose(const FilterState& state, const MeasurementModel& /*model*/,
                          const FilterConfig& config, const StepHooks& hooks) {
  const std::vector<double> log_w = extraction_log_weights(state, config, hooks);
  const ProposalSnapshot& snap = state.proposal;

  PoseEstimate est;
  if (!normalize_log_weights(log_w, est.extraction_weights)) {
    // Fall back to the propagated weights; they are always normalized.
    est.extraction_weights = snap.weight;
  }
  const auto [best, score] =
      map_particle(snap.sampled, snap.cov, est.extraction_weights, config.threads);
  est.particle = best;
  est.map_score = score;
  est.pose = Pose::from_vector(snap.sampled[best]);
  return est;
}

RunResult run(std::span<const Vec3> measurements, const MeasurementModel& model,
              const FilterConfig& config, const std::optional<Pose>& truth,
              const SuccessCriteria& criteria) {
  if (measurements.empty()) throw Error(ErrorCode::InvalidConfig, "run needs at least one measurement");

  const auto start = std::chrono::steady_clock::now();
  RunResult out;
  FilterState state = init(config);
  for (std::size_t k = 0; k < measurements.size(); ++k) {
    const StepDiagnostics diag = step(state, measurements[k], model, config);
    out.diagnostics.push_back(diag);
    if (diag.degenerate_recovered) ++out.report.degenerate_events;
    out.estimates.push_back(extract_pose(state, model, config));
    out.report.index_trace.push_back(
        performance_index(measurements.first(k + 1), out.estimates.back().pose, model.mesh()));
  }
  const auto stop = std::chrono::steady_clock::now();

  TrialReport& rep = out.report;
  rep.estimate = canonicalize(out.estimates.back().pose);
  rep.final_index = rep.index_trace.back();
  rep.elapsed = std::chrono::duration<double>(stop - start).count();
  rep.seed = config.seed;
  if (truth) rep.error = pose_error(rep.estimate, *truth);
  rep.success = success_test(rep, criteria, truth);
  return out;
}

}  // namespace mupf
