#include <cmath>
#include <memory>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "mupf/linalg.hpp"
#include "mupf/measurement.hpp"
#include "mupf/ukf.hpp"
#include "test_support.hpp"

using namespace mupf;
using mupf::testing::random_point;
using mupf::testing::random_spd;

namespace {

std::shared_ptr<const TriMesh> unit_box() {
  return std::make_shared<const TriMesh>(make_box({1.0, 1.0, 1.0}));
}

Pose random_pose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> a(-3.0, 3.0), h(-1.5, 1.5), p(-0.2, 0.2);
  return {p(rng), p(rng), p(rng), a(rng), h(rng), a(rng)};
}

double min_eigenvalue(const Mat6& m) {
  return Eigen::SelfAdjointEigenSolver<Mat6>(m).eigenvalues().minCoeff();
}

}  // namespace

TEST(Likelihood, ZeroOnSurface) {
  const MeasurementModel model(unit_box(), 0.01);
  // Rounding in the projection leaves at most ~1e-15 m of distance.
  EXPECT_NEAR(model.log_likelihood({0.5, 0.1, -0.2}, Pose{}), 0.0, 1e-20);
}

TEST(Likelihood, OneSigmaGivesMinusHalf) {
  const MeasurementModel model(unit_box(), 0.01);
  EXPECT_NEAR(model.log_likelihood({0.51, 0.0, 0.0}, Pose{}), -0.5, 1e-12);
}

TEST(Likelihood, MatchesPerFaceBruteForce) {
  auto mesh = std::make_shared<const TriMesh>(mupf::testing::lumpy_sphere(12, 8, 0.1, 31));
  const double sigma = 0.02;
  const MeasurementModel model(mesh, sigma);
  std::mt19937_64 rng(32);
  for (int i = 0; i < 300; ++i) {
    const Pose x = random_pose(rng);
    const Vec3 y = random_point(rng, 0.4);
    const Vec3 local = transform_point_into_object_frame(y, x);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < mesh->face_count(); ++f) {
      const Vec3 p = closest_point_on_triangle(local, mesh->vertex(f, 0), mesh->vertex(f, 1),
                                               mesh->vertex(f, 2));
      best = std::min(best, (p - local).norm());
    }
    EXPECT_NEAR(model.log_likelihood(y, x), -(best * best) / (2 * sigma * sigma), 1e-9);
  }
}

TEST(Likelihood, TranslationConsistent) {
  const MeasurementModel model(unit_box(), 0.05);
  std::mt19937_64 rng(33);
  for (int i = 0; i < 200; ++i) {
    Pose x = random_pose(rng);
    const Vec3 y = random_point(rng, 1.0);
    const Vec3 shift = random_point(rng, 5.0);
    const double before = model.log_likelihood(y, x);
    x.x += shift.x();
    x.y += shift.y();
    x.z += shift.z();
    EXPECT_NEAR(model.log_likelihood(y + shift, x), before, 1e-9 * (1 + std::abs(before)));
  }
}

TEST(Likelihood, RejectsNonPositiveSigma) {
  EXPECT_THROW(MeasurementModel(unit_box(), 0.0), Error);
  EXPECT_THROW(MeasurementModel(nullptr, 0.1), Error);
}

TEST(PredictMeasurement, OnSurfaceIsIdentity) {
  const MeasurementModel model(unit_box(), 0.01);
  const Vec3 y(0.5, 0.2, 0.3);
  EXPECT_LT((model.predict_measurement(y, Pose{}) - y).norm(), 1e-15);
}

TEST(PredictMeasurement, FaceProjection) {
  const MeasurementModel model(unit_box(), 0.01);
  EXPECT_LT((model.predict_measurement({2, 0, 0}, Pose{}) - Vec3(0.5, 0, 0)).norm(), 1e-15);
}

TEST(PredictMeasurement, ConsistentWithLikelihood) {
  const double sigma = 0.03;
  const MeasurementModel model(unit_box(), sigma);
  std::mt19937_64 rng(34);
  for (int i = 0; i < 300; ++i) {
    const Pose x = random_pose(rng);
    const Vec3 y = random_point(rng, 1.5);
    const double d2 = (y - model.predict_measurement(y, x)).squaredNorm();
    const double ll = model.log_likelihood(y, x);
    EXPECT_NEAR(d2, -2 * sigma * sigma * ll, 1e-9 * std::max(d2, 1e-12));
  }
}

TEST(Ukf, NoInnovationAtZeroCovariance) {
  const MeasurementModel model(unit_box(), 0.01);
  Particle p;
  p.mean << 0.1, -0.2, 0.05, 0.3, 0.1, -0.4;
  const Vec3 y = transform_point_into_world_frame({0.5, 0.1, 0.2}, Pose::from_vector(p.mean));
  const UkfResult r = ukf_step(p, y, model, Mat6::Zero(), 1e-4 * Mat3::Identity(), SutParams{});
  EXPECT_LT((r.mean - p.mean).norm(), 1e-12);
  EXPECT_LT(r.cov.norm(), 1e-12);
}

// Closed-form Kalman update on the same matrices.
TEST(Ukf, AffineMapMatchesKalmanFilter) {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec6 x = mupf::testing::random_vector(rng, 6);
    const Mat6 p = random_spd<6>(rng, 1.0, 1e-2);
    const Mat3 r = random_spd<3>(rng, 0.1, 1e-2);
    const Eigen::Matrix<double, 3, 6> h = Eigen::Matrix<double, 3, 6>::Random();
    const Vec3 c = Vec3::Random();
    const Vec3 y = Vec3::Random() * 3;

    const UkfResult u = ukf_correct(x, p, y, r, SutParams{},
                                    [&](const Vec6& s) -> Vec3 { return h * s + c; });

    const Mat3 s = h * p * h.transpose() + r;
    const Eigen::Matrix<double, 6, 3> k = p * h.transpose() * s.inverse();
    const Vec6 x_kf = x + k * (y - h * x - c);
    const Mat6 p_kf = p - k * s * k.transpose();

    EXPECT_LT((u.mean - x_kf).norm(), 1e-8 * x_kf.norm());
    EXPECT_LT((u.cov - p_kf).norm(), 1e-8 * p_kf.norm());
  }
}

TEST(Ukf, CorrectionNeverInflates) {
  const auto mesh = unit_box();
  const MeasurementModel model(mesh, 0.05);
  std::mt19937_64 rng(36);
  const Mat6 q = Vec6(1e-5, 1e-5, 1e-5, 1e-4, 1e-4, 1e-4).asDiagonal();
  const Mat3 r = 2.5e-3 * Mat3::Identity();
  for (int i = 0; i < 100; ++i) {
    Particle p;
    p.mean = random_pose(rng).to_vector();
    p.cov = random_spd<6>(rng, 0.05, 1e-4);
    const Vec3 y = random_point(rng, 0.8);
    const UkfResult u = ukf_step(p, y, model, q, r, SutParams{});
    const Mat6 pred = p.cov + q;
    EXPECT_GE(min_eigenvalue(pred - u.cov), -1e-9);
    EXPECT_GE(min_eigenvalue(u.cov), -1e-10);
    EXPECT_LT((u.cov - u.cov.transpose()).norm(), 1e-10);
  }
}

TEST(Ukf, InnovationDominatesMeasurementNoise) {
  const MeasurementModel model(unit_box(), 0.05);
  std::mt19937_64 rng(37);
  const Vec6 x = random_pose(rng).to_vector();
  const Mat6 p = random_spd<6>(rng, 0.05, 1e-4);
  const Mat3 r = 1e-4 * Mat3::Identity();
  const Vec3 y = random_point(rng, 0.8);
  const SigmaPointSet set = make_sigma_points(x, p, SutParams{});
  const UnscentedMoments m = propagate(set, [&](const Eigen::VectorXd& s) -> Eigen::VectorXd {
    return model.predict_measurement(y, Pose::from_vector(Vec6(s)));
  });
  const Mat3 s = m.cov + r;
  for (int i = 0; i < 3; ++i) EXPECT_GE(s(i, i), r(i, i));
}

TEST(RepairPsd, LiftsNegativeEigenvalues) {
  Mat6 m = Mat6::Identity();
  m(0, 0) = -1e-3;
  m(1, 2) = 0.2;
  const Mat6 r = repair_psd(m);
  EXPECT_EQ(r, r.transpose());
  EXPECT_GE(min_eigenvalue(r), -1e-12);
}

TEST(RepairPsd, LeavesPsdAlone) {
  std::mt19937_64 rng(38);
  const Mat6 m = random_spd<6>(rng);
  EXPECT_LT((repair_psd(m) - m).norm(), 1e-14);
}

TEST(Gaussian, LogPdfMatchesClosedForm) {
  std::mt19937_64 rng(39);
  const Vec6 mu = mupf::testing::random_vector(rng, 6);
  const Mat6 cov = random_spd<6>(rng);
  const Vec6 x = mupf::testing::random_vector(rng, 6);
  const Vec6 d = x - mu;
  const double expected = -0.5 * d.dot(cov.ldlt().solve(d)) -
                          0.5 * std::log(cov.determinant()) - 3.0 * std::log(2 * M_PI);
  EXPECT_NEAR(Gaussian6(mu, cov).log_pdf(x), expected, 1e-12 * std::abs(expected));
}
