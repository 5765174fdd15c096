#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "mupf/geometry.hpp"
#include "mupf/unscented.hpp"

namespace mupf {

enum class ResamplingScheme { Multinomial, Systematic };
enum class DegeneratePolicy { Recover, Throw };

/// Every tunable of the filter. Defaults are the simulation parameter set
/// (`simulation()`); `experimental()` is the experimental profile.
struct FilterConfig {
  std::size_t particles = 700;
  std::size_t memory = 10;  // window length m
  Mat6 q = Vec6(1e-5, 1e-5, 1e-5, 1e-4, 1e-4, 1e-4).asDiagonal();
  Mat6 p0 = Mat6::Zero();
  Pose x0;
  /// Stored verbatim; see `sigma_p_is_variance`.
  double sigma_p = 1e-4;
  /// When true (default) `sigma_p` is a variance and the likelihood std is
  /// sqrt(sigma_p), i.e. 1e-4 -> 1 cm.
  bool sigma_p_is_variance = true;
  /// Measurement noise covariance of the UKF; sigma^2 * I when unset.
  std::optional<Mat3> r;
  SutParams sut;
  std::size_t t0 = 2;  // resampling is skipped while t <= t0
  std::uint64_t seed = 1;
  /// Draw initial particles from p0^m, i.e. N(x0, P0 / m).
  bool prior_exponent = true;
  /// Multiply the Gaussian random-walk transition density into the
  /// importance weight. Off: the memory weight update omits it.
  bool transition_density = false;
  /// Divide extraction weights by the proposal density as the memory
  /// weights do. Off: extraction reweights the propagated weights by the
  /// extra likelihood powers only.
  bool extraction_proposal_correction = true;
  ResamplingScheme resampling = ResamplingScheme::Multinomial;
  DegeneratePolicy on_degenerate = DegeneratePolicy::Recover;
  /// Worker threads for the per-particle stage; 0 = all cores, 1 = serial.
  std::size_t threads = 0;

  FilterConfig();

  static FilterConfig simulation();
  static FilterConfig experimental();

  /// Likelihood standard deviation in meters.
  double likelihood_sigma() const;
  Mat3 measurement_noise() const;
  Mat6 initial_sampling_cov() const;

  /// Throws Error{InvalidConfig} on any violated invariant.
  void validate() const;
};

nlohmann::json to_json(const FilterConfig& c);
/// Fields missing from `j` keep the values of `base`.
FilterConfig filter_config_from_json(const nlohmann::json& j, FilterConfig base = {});

std::string_view to_string(ResamplingScheme s);

}  // namespace mupf
