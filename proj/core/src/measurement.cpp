#include "mupf/measurement.hpp"

#include <cmath>

#include "mupf/error.hpp"

namespace mupf {

MeasurementModel::MeasurementModel(std::shared_ptr<const TriMesh> mesh, double sigma)
    : mesh_(std::move(mesh)), sigma_(sigma) {
  if (!mesh_) throw Error(ErrorCode::EmptyMesh, "measurement model needs a mesh");
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
    throw Error(ErrorCode::InvalidConfig, "likelihood sigma must be positive and finite");
  }
}

double MeasurementModel::distance(const Vec3& y, const Pose& x) const {
  return mesh_->closest_point(transform_point_into_object_frame(y, x)).distance;
}

double MeasurementModel::log_likelihood(const Vec3& y, const Pose& x) const {
  const double d = distance(y, x);
  return -(d * d) / (2.0 * sigma_ * sigma_);
}

Vec3 MeasurementModel::predict_measurement(const Vec3& y, const Pose& x) const {
  const Mat3 r = rotation_of(x);
  const Vec3 t = x.translation();
  const Vec3 local = r.transpose() * (y - t);
  return r * mesh_->closest_point(local).point + t;
}

}  // namespace mupf
