#include <cmath>
#include <memory>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "mupf/mupf.hpp"
#include "mupf/rng.hpp"
#include "mupf/simulate.hpp"
#include "mupf/upf.hpp"
#include "test_support.hpp"

using namespace mupf;

namespace {

struct Scene {
  std::shared_ptr<const TriMesh> mesh;
  Pose truth{0.02, -0.01, 0.03, 0.3, -0.1, 0.2};
  std::vector<Vec3> ys;
};

Scene box_scene(std::size_t count, double noise = 0.001) {
  Scene s;
  s.mesh = std::make_shared<const TriMesh>(make_box({0.1, 0.3, 0.2}));
  ScenarioSpec spec;
  spec.true_pose = s.truth;
  spec.measurements = count;
  spec.noise_sigma = noise;
  spec.seed = 99;
  s.ys = sample_contacts(spec, *s.mesh).measurements;
  return s;
}

FilterConfig small_config(std::size_t n = 40, std::size_t m = 5) {
  FilterConfig c;
  c.particles = n;
  c.memory = m;
  c.seed = 1234;
  c.threads = 1;
  return c;
}

}  // namespace

TEST(Init, SingleParticle) {
  FilterConfig c = small_config(1);
  const FilterState s = init(c);
  ASSERT_EQ(s.particles.size(), 1u);
  EXPECT_EQ(s.particles[0].weight, 1.0);
  EXPECT_EQ(s.particles[0].cov, c.p0);
}

TEST(Init, Deterministic) {
  const FilterConfig c = small_config(200);
  const FilterState a = init(c), b = init(c);
  for (std::size_t i = 0; i < a.particles.size(); ++i) {
    EXPECT_EQ(a.particles[i].mean, b.particles[i].mean);
  }
}

// Sample moments of 1e5 draws against the sampling covariance P0/m.
TEST(Init, MonteCarloMoments) {
  FilterConfig c = small_config(100000, 10);
  c.x0 = Pose{0.1, -0.2, 0.3, 0.5, 0.0, -0.5};
  const FilterState s = init(c);
  const Mat6 cov = c.initial_sampling_cov();
  EXPECT_EQ(cov, c.p0 / 10.0);

  Vec6 mean = Vec6::Zero();
  for (const auto& p : s.particles) mean += p.mean;
  mean /= static_cast<double>(s.particles.size());
  Mat6 sample_cov = Mat6::Zero();
  for (const auto& p : s.particles) sample_cov += (p.mean - mean) * (p.mean - mean).transpose();
  sample_cov /= static_cast<double>(s.particles.size() - 1);

  const double n = static_cast<double>(s.particles.size());
  for (int k = 0; k < 6; ++k) {
    const double sd = std::sqrt(cov(k, k));
    EXPECT_LT(std::abs(mean[k] - c.x0.to_vector()[k]), 3.0 * sd / std::sqrt(n)) << k;
    // Variance of a sample variance is about 2 sigma^4 / n.
    EXPECT_LT(std::abs(sample_cov(k, k) - cov(k, k)), 4.0 * cov(k, k) * std::sqrt(2.0 / n)) << k;
  }
}

TEST(Init, RejectsInvalidConfig) {
  FilterConfig c = small_config();
  c.particles = 0;
  EXPECT_THROW(init(c), Error);
  c = small_config();
  c.memory = 0;
  EXPECT_THROW(init(c), Error);
  c = small_config();
  c.p0(0, 0) = -1.0;
  EXPECT_THROW(init(c), Error);
}

TEST(Step, WeightsNormalizedAndHistoryBounded) {
  const Scene sc = box_scene(8);
  const FilterConfig c = small_config(30, 3);
  const MeasurementModel model = make_model(sc.mesh, c);
  FilterState s = init(c);
  for (std::size_t t = 0; t < sc.ys.size(); ++t) {
    step(s, sc.ys[t], model, c);
    EXPECT_EQ(s.history.size(), std::min<std::size_t>(t + 1, 3));
    const double pw = std::accumulate(s.proposal.weight.begin(), s.proposal.weight.end(), 0.0);
    EXPECT_NEAR(pw, 1.0, 1e-10);
    double sum = 0.0;
    for (const auto& p : s.particles) sum += p.weight;
    EXPECT_NEAR(sum, 1.0, 1e-10);
    for (const auto& cov : s.proposal.cov) EXPECT_LT((cov - cov.transpose()).norm(), 1e-10);
  }
}

TEST(Step, DelayedResampling) {
  const Scene sc = box_scene(4);
  FilterConfig c = small_config(30, 3);
  c.t0 = 2;
  const MeasurementModel model = make_model(sc.mesh, c);
  FilterState s = init(c);
  for (std::size_t t = 0; t < sc.ys.size(); ++t) {
    const auto d = step(s, sc.ys[t], model, c);
    EXPECT_EQ(d.resampled, t + 1 > 2);
    if (!d.resampled) {
      for (std::size_t i = 0; i < s.particles.size(); ++i) {
        EXPECT_EQ(s.particles[i].mean, s.proposal.sampled[i]);
        EXPECT_EQ(s.particles[i].cov, s.proposal.cov[i]);
      }
    }
  }
}

// Each y_k enters propagated-weight updates at steps k .. k+m-1.
TEST(Audit, EachMeasurementUsedMTimes) {
  const std::size_t T = 20, m = 5, n = 12;
  const Scene sc = box_scene(T);
  const FilterConfig c = small_config(n, m);
  const MeasurementModel model = make_model(sc.mesh, c);
  LikelihoodAudit audit;
  FilterState s = init(c);
  for (const auto& y : sc.ys) step(s, y, model, c, {&audit});
  for (std::size_t k = 1; k <= T; ++k) {
    const std::size_t uses = std::min(k + m - 1, T) - k + 1;
    EXPECT_EQ(audit.propagated_calls(k), uses * n) << "k=" << k;
  }
}

// Propagated uses plus the extraction exponent give every y_k weight m.
TEST(Audit, ExtractionCompletesExponentToM) {
  const std::size_t T = 12, m = 5, n = 6;
  const Scene sc = box_scene(T);
  const FilterConfig c = small_config(n, m);
  const MeasurementModel model = make_model(sc.mesh, c);
  LikelihoodAudit audit;
  FilterState s = init(c);
  for (std::size_t t = 1; t <= T; ++t) {
    step(s, sc.ys[t - 1], model, c, {&audit});
    audit.reset_extraction();
    extract_pose(s, model, c, {&audit});
    if (t < m) continue;
    for (std::size_t k = 1; k <= t; ++k) {
      const double uses = static_cast<double>(audit.propagated_calls(k)) / n;
      EXPECT_DOUBLE_EQ(uses + audit.last_extraction_exponent(k), static_cast<double>(m))
          << "t=" << t << " k=" << k;
    }
  }
  EXPECT_EQ(c.initial_sampling_cov(), c.p0 / static_cast<double>(m));
}

TEST(Extraction, DoesNotTouchPropagatedWeights) {
  const Scene sc = box_scene(4);
  const FilterConfig c = small_config(20, 3);
  const MeasurementModel model = make_model(sc.mesh, c);
  FilterState s = init(c);
  for (const auto& y : sc.ys) step(s, y, model, c);
  const auto before = s.proposal.weight;
  const auto est = extract_pose(s, model, c);
  EXPECT_EQ(s.proposal.weight, before);
  EXPECT_EQ(est.pose.to_vector(), s.proposal.sampled[est.particle]);
  EXPECT_NEAR(std::accumulate(est.extraction_weights.begin(), est.extraction_weights.end(), 0.0),
              1.0, 1e-10);
}

TEST(Extraction, SingleParticle) {
  const Scene sc = box_scene(3);
  const FilterConfig c = small_config(1, 3);
  const MeasurementModel model = make_model(sc.mesh, c);
  FilterState s = init(c);
  for (const auto& y : sc.ys) step(s, y, model, c);
  const auto est = extract_pose(s, model, c);
  EXPECT_EQ(est.particle, 0u);
  EXPECT_EQ(est.pose.to_vector(), s.proposal.sampled[0]);
}

TEST(Map, HeavyClusterWins) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 0.01);
  std::vector<Vec6> xs;
  std::vector<Mat6> covs;
  std::vector<double> w;
  const Mat6 cov = 1e-3 * Mat6::Identity();
  // Light cluster is tighter so it alone would win on self-density.
  for (int i = 0; i < 10; ++i) {
    Vec6 x = Vec6::Constant(1.0);
    for (int k = 0; k < 6; ++k) x[k] += 0.1 * g(rng);
    xs.push_back(x);
    covs.push_back(cov);
    w.push_back(0.1 / 10);
  }
  for (int i = 0; i < 10; ++i) {
    Vec6 x = Vec6::Constant(-1.0);
    for (int k = 0; k < 6; ++k) x[k] += g(rng);
    xs.push_back(x);
    covs.push_back(cov);
    w.push_back(0.9 / 10);
  }
  const auto [best, score] = map_particle(xs, covs, w, 1);
  EXPECT_GE(best, 10u);

  // Direct evaluation of the mixture at every sample.
  std::size_t oracle = 0;
  double top = -1e300;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    double dens = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const Vec6 d = xs[j] - xs[i];
      dens += w[i] * std::exp(-0.5 * d.squaredNorm() / 1e-3) /
              std::pow(2 * M_PI * 1e-3, 3.0);
    }
    if (dens > top) {
      top = dens;
      oracle = j;
    }
  }
  EXPECT_EQ(best, oracle);
  EXPECT_NEAR(score, std::log(top), 1e-9);
}

// Pearson chi-square, 7 dof, critical value at p = 0.001 is 24.32.
TEST(Resample, MultinomialFrequenciesMatchWeights) {
  const std::vector<double> w{0.05, 0.2, 0.1, 0.15, 0.3, 0.02, 0.08, 0.1};
  const std::size_t rounds = 12500;  // 8 children per call, 1e5 draws
  std::vector<double> count(w.size(), 0.0);
  for (std::size_t r = 0; r < rounds; ++r) {
    auto rng = make_rng(42, r, 0, RngStream::Resample);
    for (auto i : resample_indices(w, ResamplingScheme::Multinomial, rng)) count[i] += 1.0;
  }
  const double draws = static_cast<double>(rounds * w.size());
  double chi2 = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double expected = w[k] * draws;
    chi2 += (count[k] - expected) * (count[k] - expected) / expected;
  }
  EXPECT_LT(chi2, 24.32);
}

TEST(Resample, NeverPicksZeroWeight) {
  const std::vector<double> w{0.0, 0.5, 0.0, 0.5, 0.0};
  for (auto scheme : {ResamplingScheme::Multinomial, ResamplingScheme::Systematic}) {
    auto rng = make_rng(7, 3, 0, RngStream::Resample);
    for (auto i : resample_indices(w, scheme, rng)) EXPECT_TRUE(i == 1 || i == 3);
  }
}

// m = 1, t0 = 0: the memory filter is the plain UPF, bit for bit.
TEST(Reduction, MatchesPlainUpfBitwise) {
  const Scene sc = box_scene(10);
  FilterConfig c = small_config(25, 1);
  c.t0 = 0;
  const MeasurementModel model = make_model(sc.mesh, c);
  FilterState a = init(c), b = init(c);
  for (const auto& y : sc.ys) {
    step(a, y, model, c);
    upf_step(b, y, model, c);
    ASSERT_EQ(a.particles.size(), b.particles.size());
    for (std::size_t i = 0; i < a.particles.size(); ++i) {
      EXPECT_EQ(a.particles[i].mean, b.particles[i].mean);
      EXPECT_EQ(a.particles[i].cov, b.particles[i].cov);
      EXPECT_EQ(a.particles[i].weight, b.particles[i].weight);
    }
  }
}

TEST(Run, PerfectParticleHasZeroIndex) {
  const Scene sc = box_scene(6, 0.0);
  FilterConfig c = small_config(1, 3);
  c.q.setZero();
  c.p0.setZero();
  c.x0 = sc.truth;
  const MeasurementModel model = make_model(sc.mesh, c);
  const RunResult r = run(sc.ys, model, c, sc.truth);
  ASSERT_EQ(r.report.index_trace.size(), 6u);
  for (double v : r.report.index_trace) EXPECT_LT(v, 1e-12);
  EXPECT_TRUE(r.report.success);
}

TEST(Run, SerialAndParallelAgree) {
  const Scene sc = box_scene(6);
  FilterConfig c = small_config(64, 4);
  const MeasurementModel model = make_model(sc.mesh, c);
  c.threads = 1;
  const RunResult serial = run(sc.ys, model, c);
  c.threads = 4;
  const RunResult parallel = run(sc.ys, model, c);
  EXPECT_EQ(serial.report.index_trace, parallel.report.index_trace);
  EXPECT_EQ(serial.report.estimate, parallel.report.estimate);
}

TEST(Run, EmptyMeasurementsRejected) {
  const Scene sc = box_scene(1);
  const FilterConfig c = small_config();
  EXPECT_THROW(run({}, make_model(sc.mesh, c), c), Error);
}

TEST(Run, DegenerateWeightsCanThrow) {
  const Scene sc = box_scene(1);
  FilterConfig c = small_config(5, 2);
  c.on_degenerate = DegeneratePolicy::Throw;
  const std::vector<Vec3> far{Vec3(1e200, 0, 0)};
  try {
    run(far, make_model(sc.mesh, c), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_FALSE(e.is_validation());
  }
}
