#include "mupf/metrics.hpp"

#include <cmath>

#include "mupf/error.hpp"

namespace mupf {

double performance_index(std::span<const Vec3> measurements, const Pose& estimate,
                         const TriMesh& mesh) {
  if (measurements.empty()) {
    throw Error(ErrorCode::InvalidConfig, "performance index needs at least one measurement");
  }
  const Mat3 r = rotation_of(estimate);
  const Vec3 t = estimate.translation();
  double sum = 0.0;
  for (const auto& y : measurements) sum += mesh.closest_point(r.transpose() * (y - t)).distance;
  return sum / static_cast<double>(measurements.size());
}

double rotation_angle_between(const Mat3& a, const Mat3& b) {
  // atan2 form stays accurate near 0 and pi, where acos of the trace is not.
  const Mat3 d = a * b.transpose();
  const Vec3 axis(d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1));
  return std::atan2(0.5 * axis.norm(), 0.5 * (d.trace() - 1.0));
}

PoseError pose_error(const Pose& estimate, const Pose& truth) {
  return {(estimate.translation() - truth.translation()).norm(),
          rotation_angle_between(rotation_of(estimate), rotation_of(truth))};
}

bool success_test(const TrialReport& report, const SuccessCriteria& criteria,
                  const std::optional<Pose>& truth) {
  if (!(criteria.position > 0.0) || !(criteria.orientation > 0.0) || !(criteria.index > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "success thresholds must be positive");
  }
  if (truth) {
    const PoseError e = pose_error(report.estimate, *truth);
    return e.position < criteria.position && e.orientation < criteria.orientation;
  }
  // Without ground truth only the index is available; a wrong pose that
  // happens to fit the measurements passes this test.
  return report.final_index < criteria.index;
}

}  // namespace mupf
