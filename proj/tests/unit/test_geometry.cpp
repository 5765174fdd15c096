#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "mupf/geometry.hpp"
#include "mupf/metrics.hpp"

using namespace mupf;

namespace {

constexpr double kPi = std::numbers::pi;

Mat3 axis_angle_zyx(double phi, double theta, double psi) {
  return (Eigen::AngleAxisd(psi, Vec3::UnitZ()) * Eigen::AngleAxisd(theta, Vec3::UnitY()) *
          Eigen::AngleAxisd(phi, Vec3::UnitX()))
      .toRotationMatrix();
}

Pose random_pose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> a(-kPi, kPi), h(-kPi / 2 + 1e-3, kPi / 2 - 1e-3),
      p(-1.0, 1.0);
  return {p(rng), p(rng), p(rng), a(rng), h(rng), a(rng)};
}

}  // namespace

TEST(Geometry, ZeroAnglesGiveIdentity) {
  EXPECT_TRUE(euler_to_rotation(0, 0, 0).isApprox(Mat3::Identity(), 0.0));
}

TEST(Geometry, YawQuarterTurnMapsXToY) {
  const Vec3 r = euler_to_rotation(0, 0, kPi / 2) * Vec3::UnitX();
  EXPECT_NEAR((r - Vec3::UnitY()).norm(), 0.0, 1e-15);
}

TEST(Geometry, MatchesZyxAxisAngleComposition) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Pose p = random_pose(rng);
    const Mat3 r = euler_to_rotation(p.phi, p.theta, p.psi);
    EXPECT_LT((r - axis_angle_zyx(p.phi, p.theta, p.psi)).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((r.transpose() * r - Mat3::Identity()).norm(), 1e-14);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-14);
  }
}

TEST(Geometry, PoseTransformRoundTrip) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 500; ++i) {
    const Pose p = random_pose(rng);
    const Pose q = transform_to_pose(pose_to_transform(p));
    EXPECT_LT((p.to_vector() - q.to_vector()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Geometry, GimbalLockKeepsRotation) {
  for (double theta : {kPi / 2, -kPi / 2}) {
    const Pose p{0.1, 0.2, 0.3, 0.7, theta, -0.4};
    const Pose q = transform_to_pose(pose_to_transform(p));
    EXPECT_EQ(q.psi, 0.0);
    EXPECT_LT((rotation_of(p) - rotation_of(q)).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Geometry, ObjectAndWorldFramesAreInverse) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  for (int i = 0; i < 200; ++i) {
    const Pose p = random_pose(rng);
    const Vec3 y(g(rng), g(rng), g(rng));
    const Vec3 back = transform_point_into_world_frame(transform_point_into_object_frame(y, p), p);
    EXPECT_LT((back - y).norm(), 1e-12);
  }
}

TEST(Geometry, CanonicalizeKeepsRotation) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> wide(-20.0, 20.0);
  for (int i = 0; i < 300; ++i) {
    const Pose p{0, 0, 0, wide(rng), wide(rng), wide(rng)};
    const Pose c = canonicalize(p);
    EXPECT_LE(std::abs(c.theta), kPi / 2 + 1e-12);
    EXPECT_GT(c.phi, -kPi - 1e-12);
    EXPECT_LE(c.phi, kPi + 1e-12);
    EXPECT_LT((rotation_of(p) - rotation_of(c)).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Geometry, WrapAngle) {
  EXPECT_DOUBLE_EQ(wrap_angle(0.5), 0.5);
  EXPECT_NEAR(wrap_angle(3 * kPi), kPi, 1e-12);
  EXPECT_NEAR(wrap_angle(-kPi), kPi, 1e-12);
  EXPECT_NEAR(wrap_angle(2 * kPi + 0.25), 0.25, 1e-12);
}

// Quaternion angular distance is an independent route to the geodesic.
TEST(Geometry, RotationAngleMatchesQuaternionDistance) {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 500; ++i) {
    const Pose a = random_pose(rng), b = random_pose(rng);
    const Mat3 ra = rotation_of(a), rb = rotation_of(b);
    const double oracle = Eigen::Quaterniond(ra).angularDistance(Eigen::Quaterniond(rb));
    EXPECT_NEAR(rotation_angle_between(ra, rb), oracle, 1e-9);
  }
}
