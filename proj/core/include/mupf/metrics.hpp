#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "mupf/geometry.hpp"
#include "mupf/mesh.hpp"

namespace mupf {

struct PoseError {
  double position = 0.0;     // meters
  double orientation = 0.0;  // radians, geodesic angle in [0, pi]
};

/// Success thresholds. With ground truth a trial succeeds when both pose
/// errors are below their thresholds; without it, when the final index is.
struct SuccessCriteria {
  double position = 0.02;
  double orientation = std::numbers::pi / 18.0;  // 10 degrees
  double index = 0.01;
};

struct TrialReport {
  Pose estimate;                  // canonical angles
  std::vector<double> index_trace;  // I_t for t = 1..L
  double final_index = 0.0;
  std::optional<PoseError> error;  // present when the true pose is known
  double elapsed = 0.0;            // seconds
  bool success = false;
  std::uint64_t seed = 0;
  std::size_t degenerate_events = 0;
};

/// Mean distance of the measurements to the mesh posed at `estimate`.
/// Throws Error{InvalidConfig} on an empty measurement list.
double performance_index(std::span<const Vec3> measurements, const Pose& estimate,
                         const TriMesh& mesh);

PoseError pose_error(const Pose& estimate, const Pose& truth);

/// Rotation angle of R_a R_b^T, in [0, pi].
double rotation_angle_between(const Mat3& a, const Mat3& b);

/// Throws Error{InvalidConfig} if any threshold is not positive.
bool success_test(const TrialReport& report, const SuccessCriteria& criteria,
                  const std::optional<Pose>& truth);

}  // namespace mupf
