#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace mupf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Transform = Eigen::Matrix4d;

/// Rigid-body pose: translation in meters, orientation as Euler angles in
/// radians.
///
/// Euler convention (the only place it is defined): intrinsic Z-Y-X, i.e.
///   R = Rz(psi) * Ry(theta) * Rx(phi)
/// with psi = yaw, theta = pitch, phi = roll. `theta` is the bounded angle;
/// canonical form has theta in [-pi/2, pi/2] and phi, psi in (-pi, pi].
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double phi = 0.0;
  double theta = 0.0;
  double psi = 0.0;

  static Pose from_vector(const Vec6& v) { return {v[0], v[1], v[2], v[3], v[4], v[5]}; }
  Vec6 to_vector() const { return (Vec6() << x, y, z, phi, theta, psi).finished(); }
  Vec3 translation() const { return {x, y, z}; }

  bool operator==(const Pose&) const = default;
};

Mat3 euler_to_rotation(double phi, double theta, double psi);
Mat3 rotation_of(const Pose& p);

/// 4x4 homogeneous object-to-world transform.
Transform pose_to_transform(const Pose& p);

/// Inverse of `pose_to_transform`'s rotation block, i.e. angles with theta in
/// [-pi/2, pi/2]. At gimbal lock (|theta| = pi/2) psi is set to 0.
Pose transform_to_pose(const Transform& t);

/// Same rotation and translation, angles in canonical ranges.
Pose canonicalize(const Pose& p);

/// World-frame point expressed in the object frame of pose `p`.
Vec3 transform_point_into_object_frame(const Vec3& y, const Pose& p);

/// Object-frame point expressed in the world frame.
Vec3 transform_point_into_world_frame(const Vec3& q, const Pose& p);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

}  // namespace mupf
