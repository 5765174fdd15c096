#pragma once

#include <cstddef>
#include <deque>
#include <mutex>
#include <random>
#include <span>
#include <vector>

#include "mupf/config.hpp"
#include "mupf/measurement.hpp"
#include "mupf/metrics.hpp"
#include "mupf/ukf.hpp"

namespace mupf {

/// Measurement y_k with its 1-based arrival index k.
struct IndexedMeasurement {
  std::size_t index = 0;
  Vec3 point = Vec3::Zero();
};

/// Population right after the weight update and before resampling. Pose
/// extraction reads this; the recursion never does.
struct ProposalSnapshot {
  std::vector<Vec6> sampled;    // x_hat
  std::vector<Vec6> mean;       // x_bar
  std::vector<Mat6> cov;        // P_{t|t}
  std::vector<double> weight;   // normalized propagated weight
  std::vector<double> log_proposal;  // log N(x_hat; x_bar, P)
  /// log-likelihoods of the window measurements, particle-major, window
  /// ordered oldest first.
  std::vector<double> log_likelihood;
  std::vector<std::size_t> window;  // measurement indices k in the window

  double loglik(std::size_t particle, std::size_t slot) const {
    return log_likelihood[particle * window.size() + slot];
  }
  bool empty() const { return sampled.empty(); }
};

struct FilterState {
  std::vector<Particle> particles;
  std::deque<IndexedMeasurement> history;  // at most m entries, oldest first
  std::size_t t = 0;
  ProposalSnapshot proposal;
};

struct StepDiagnostics {
  std::size_t t = 0;
  double effective_sample_size = 0.0;
  bool resampled = false;
  bool degenerate_recovered = false;
};

/// Counts likelihood evaluations per measurement index for audits.
/// Thread-safe; only used when attached to a step.
class LikelihoodAudit {
 public:
  void record_propagated(std::size_t k);
  void record_extraction(std::size_t k, double exponent);

  /// Number of likelihood calls on y_k made by propagated-weight updates.
  std::size_t propagated_calls(std::size_t k) const;
  /// Exponents applied to y_k by the most recent extraction.
  double last_extraction_exponent(std::size_t k) const;
  void reset_extraction();

 private:
  mutable std::mutex mutex_;
  std::vector<std::size_t> propagated_;
  std::vector<double> extraction_;
};

struct StepHooks {
  LikelihoodAudit* audit = nullptr;
};

struct PoseEstimate {
  Pose pose;                    // the winning x_hat, angles not wrapped
  std::size_t particle = 0;
  double map_score = 0.0;       // log of the mixture density at `pose`
  std::vector<double> extraction_weights;
};

/// Draws N particles from N(x0, P0) (or P0/m with the prior exponent), all
/// with covariance P0 and weight 1/N.
FilterState init(const FilterConfig& config);

/// One recursion of the memory unscented particle filter on measurement y:
/// per-particle UKF, proposal draw, memory-window weights, resampling
/// (delayed until t > t0). Leaves the pre-resampling population in
/// `state.proposal`.
StepDiagnostics step(FilterState& state, const Vec3& y, const MeasurementModel& model,
                     const FilterConfig& config, const StepHooks& hooks = {});

/// MAP pose over the last proposal, using extraction weights in which y_k
/// carries the extra exponent m - t + k - 1. Does not touch the propagated
/// weights.
PoseEstimate extract_pose(const FilterState& state, const MeasurementModel& model,
                          const FilterConfig& config, const StepHooks& hooks = {});

/// Log-weights of the extraction step, unnormalized. Exposed for audits.
std::vector<double> extraction_log_weights(const FilterState& state, const FilterConfig& config,
                                           const StepHooks& hooks = {});

/// Index of the sample maximizing sum_i w_i N(sample_j; sample_i, cov_i),
/// with its log score. Lowest index wins ties.
std::pair<std::size_t, double> map_particle(std::span<const Vec6> samples,
                                            std::span<const Mat6> covs,
                                            std::span<const double> weights,
                                            std::size_t threads);

struct RunResult {
  std::vector<PoseEstimate> estimates;
  std::vector<StepDiagnostics> diagnostics;
  TrialReport report;
};

/// Runs the filter over a measurement sequence, extracting the pose and the
/// performance index after every step.
RunResult run(std::span<const Vec3> measurements, const MeasurementModel& model,
              const FilterConfig& config, const std::optional<Pose>& truth = std::nullopt,
              const SuccessCriteria& criteria = {});

/// Multinomial (or systematic) draw of N parent indices from normalized
/// weights.
std::vector<std::size_t> resample_indices(std::span<const double> weights,
                                          ResamplingScheme scheme, std::mt19937_64& rng);

/// Model built from a config's likelihood sigma.
MeasurementModel make_model(std::shared_ptr<const TriMesh> mesh, const FilterConfig& config);

}  // namespace mupf
