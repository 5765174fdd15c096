#include "mupf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mupf {

double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double w = std::fmod(a, kTwoPi);
  if (w <= -std::numbers::pi) w += kTwoPi;
  if (w > std::numbers::pi) w -= kTwoPi;
  return w;
}

Mat3 euler_to_rotation(double phi, double theta, double psi) {
  const double cf = std::cos(phi), sf = std::sin(phi);
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cp = std::cos(psi), sp = std::sin(psi);
  // Rz(psi) * Ry(theta) * Rx(phi), expanded.
  Mat3 r;
  r << cp * ct, cp * st * sf - sp * cf, cp * st * cf + sp * sf,
       sp * ct, sp * st * sf + cp * cf, sp * st * cf - cp * sf,
       -st,     ct * sf,                ct * cf;
  return r;
}

Mat3 rotation_of(const Pose& p) { return euler_to_rotation(p.phi, p.theta, p.psi); }

Transform pose_to_transform(const Pose& p) {
  Transform t = Transform::Identity();
  t.topLeftCorner<3, 3>() = rotation_of(p);
  t.topRightCorner<3, 1>() = p.translation();
  return t;
}

Pose transform_to_pose(const Transform& t) {
  const Mat3 r = t.topLeftCorner<3, 3>();
  Pose p;
  p.x = t(0, 3);
  p.y = t(1, 3);
  p.z = t(2, 3);
  const double s = std::clamp(-r(2, 0), -1.0, 1.0);
  p.theta = std::asin(s);
  if (std::abs(s) < 1.0 - 1e-12) {
    p.phi = std::atan2(r(2, 1), r(2, 2));
    p.psi = std::atan2(r(1, 0), r(0, 0));
  } else {
    // Gimbal lock: only phi -/+ psi is observable.
    p.psi = 0.0;
    p.phi = std::atan2(-r(1, 2), r(1, 1));
  }
  p.phi = wrap_angle(p.phi);
  p.psi = wrap_angle(p.psi);
  return p;
}

Pose canonicalize(const Pose& p) { return transform_to_pose(pose_to_transform(p)); }

Vec3 transform_point_into_object_frame(const Vec3& y, const Pose& p) {
  return rotation_of(p).transpose() * (y - p.translation());
}

Vec3 transform_point_into_world_frame(const Vec3& q, const Pose& p) {
  return rotation_of(p) * q + p.translation();
}

}  // namespace mupf
