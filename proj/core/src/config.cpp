#include "mupf/config.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "mupf/error.hpp"

namespace mupf {

namespace {

constexpr double kPi = std::numbers::pi;

template <int N>
bool is_psd(const Eigen::Matrix<double, N, N>& m) {
  if (!m.allFinite() || !m.isApprox(m.transpose(), 1e-12)) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> es(m);
  return es.eigenvalues().minCoeff() >= -1e-12 * std::max(1.0, m.diagonal().cwiseAbs().maxCoeff());
}

template <int N>
nlohmann::json matrix_to_json(const Eigen::Matrix<double, N, N>& m) {
  const Eigen::Matrix<double, N, N> diag = m.diagonal().asDiagonal();
  if ((m - diag).isZero(0.0)) {
    nlohmann::json d = nlohmann::json::array();
    for (int i = 0; i < N; ++i) d.push_back(m(i, i));
    return d;
  }
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < N; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < N; ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

/// Accepts a diagonal (N numbers) or a full N x N nested array.
template <int N>
Eigen::Matrix<double, N, N> matrix_from_json(const nlohmann::json& j, const char* name) {
  Eigen::Matrix<double, N, N> m = Eigen::Matrix<double, N, N>::Zero();
  if (!j.is_array() || j.size() != static_cast<std::size_t>(N)) {
    throw Error(ErrorCode::InvalidConfig,
                std::string(name) + " must be a list of " + std::to_string(N) + " entries");
  }
  for (int i = 0; i < N; ++i) {
    if (j[i].is_number()) {
      m(i, i) = j[i].get<double>();
    } else if (j[i].is_array() && j[i].size() == static_cast<std::size_t>(N)) {
      for (int k = 0; k < N; ++k) m(i, k) = j[i][k].get<double>();
    } else {
      throw Error(ErrorCode::InvalidConfig, std::string(name) + " has a malformed row");
    }
  }
  return m;
}

std::size_t count_from_json(const nlohmann::json& j, const char* name) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
    throw Error(ErrorCode::InvalidConfig, std::string(name) + " must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

}  // namespace

FilterConfig::FilterConfig() {
  p0.diagonal() << 0.04, 0.04, 0.04, kPi * kPi, (kPi / 2) * (kPi / 2), kPi * kPi;
}

FilterConfig FilterConfig::simulation() { return FilterConfig{}; }

FilterConfig FilterConfig::experimental() {
  FilterConfig c;
  c.particles = 1200;
  c.q = Vec6(1e-5, 1e-5, 1e-5, 1e-3, 1e-3, 1e-3).asDiagonal();
  c.sigma_p = 4e-4;
  return c;
}

double FilterConfig::likelihood_sigma() const {
  return sigma_p_is_variance ? std::sqrt(sigma_p) : sigma_p;
}

Mat3 FilterConfig::measurement_noise() const {
  if (r) return *r;
  const double s = likelihood_sigma();
  return Mat3::Identity() * (s * s);
}

Mat6 FilterConfig::initial_sampling_cov() const {
  return prior_exponent ? Mat6(p0 / static_cast<double>(memory)) : p0;
}

void FilterConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
  if (particles < 1) fail("N must be >= 1");
  if (memory < 1) fail("m must be >= 1");
  if (!is_psd(q)) fail("Q must be symmetric positive semi-definite");
  if (!is_psd(p0)) fail("P0 must be symmetric positive semi-definite");
  if (!x0.to_vector().allFinite()) fail("x0 must be finite");
  if (!(sigma_p > 0.0) || !std::isfinite(sigma_p)) fail("sigma_p must be positive");
  if (r && !is_psd(*r)) fail("R must be symmetric positive semi-definite");
  sut.validate(6);
}

std::string_view to_string(ResamplingScheme s) {
  return s == ResamplingScheme::Multinomial ? "multinomial" : "systematic";
}

nlohmann::json to_json(const FilterConfig& c) {
  nlohmann::json j;
  j["N"] = c.particles;
  j["m"] = c.memory;
  j["Q"] = matrix_to_json(c.q);
  j["P0"] = matrix_to_json(c.p0);
  j["x0"] = {c.x0.x, c.x0.y, c.x0.z, c.x0.phi, c.x0.theta, c.x0.psi};
  j["sigma_p"] = c.sigma_p;
  j["sigma_p_is_variance"] = c.sigma_p_is_variance;
  j["likelihood_sigma"] = c.likelihood_sigma();
  j["R"] = matrix_to_json(c.measurement_noise());
  j["alpha"] = c.sut.alpha;
  j["k"] = c.sut.k;
  j["beta"] = c.sut.beta;
  j["t0"] = c.t0;
  j["seed"] = c.seed;
  j["prior_exponent"] = c.prior_exponent;
  j["transition_density"] = c.transition_density;
  j["extraction_proposal_correction"] = c.extraction_proposal_correction;
  j["resampling"] = std::string(to_string(c.resampling));
  j["on_degenerate"] = c.on_degenerate == DegeneratePolicy::Recover ? "recover" : "throw";
  return j;
}

FilterConfig filter_config_from_json(const nlohmann::json& j, FilterConfig c) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "filter config must be an object");
  try {
    if (j.contains("N")) c.particles = count_from_json(j.at("N"), "N");
    if (j.contains("m")) c.memory = count_from_json(j.at("m"), "m");
    if (j.contains("Q")) c.q = matrix_from_json<6>(j.at("Q"), "Q");
    if (j.contains("P0")) c.p0 = matrix_from_json<6>(j.at("P0"), "P0");
    if (j.contains("x0")) {
      const auto v = j.at("x0").get<std::vector<double>>();
      if (v.size() != 6) throw Error(ErrorCode::InvalidConfig, "x0 must have 6 entries");
      c.x0 = {v[0], v[1], v[2], v[3], v[4], v[5]};
    }
    if (j.contains("sigma_p")) c.sigma_p = j.at("sigma_p").get<double>();
    if (j.contains("sigma_p_is_variance")) c.sigma_p_is_variance = j.at("sigma_p_is_variance").get<bool>();
    if (j.contains("R")) c.r = matrix_from_json<3>(j.at("R"), "R");
    if (j.contains("alpha")) c.sut.alpha = j.at("alpha").get<double>();
    if (j.contains("k")) c.sut.k = j.at("k").get<double>();
    if (j.contains("beta")) c.sut.beta = j.at("beta").get<double>();
    if (j.contains("t0")) c.t0 = count_from_json(j.at("t0"), "t0");
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("prior_exponent")) c.prior_exponent = j.at("prior_exponent").get<bool>();
    if (j.contains("transition_density")) c.transition_density = j.at("transition_density").get<bool>();
    if (j.contains("extraction_proposal_correction")) {
      c.extraction_proposal_correction = j.at("extraction_proposal_correction").get<bool>();
    }
    if (j.contains("threads")) c.threads = count_from_json(j.at("threads"), "threads");
    if (j.contains("resampling")) {
      const auto s = j.at("resampling").get<std::string>();
      if (s == "multinomial") c.resampling = ResamplingScheme::Multinomial;
      else if (s == "systematic") c.resampling = ResamplingScheme::Systematic;
      else throw Error(ErrorCode::InvalidConfig, "unknown resampling scheme '" + s + "'");
    }
    if (j.contains("on_degenerate")) {
      const auto s = j.at("on_degenerate").get<std::string>();
      if (s == "recover") c.on_degenerate = DegeneratePolicy::Recover;
      else if (s == "throw") c.on_degenerate = DegeneratePolicy::Throw;
      else throw Error(ErrorCode::InvalidConfig, "unknown on_degenerate policy '" + s + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  return c;
}

}  // namespace mupf
