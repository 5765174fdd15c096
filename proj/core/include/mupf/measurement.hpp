#pragma once

#include <memory>

#include "mupf/geometry.hpp"
#include "mupf/mesh.hpp"

namespace mupf {

/// Proximity measurement model: a contact point y is the nearest surface
/// point of the posed object plus isotropic Gaussian noise of std `sigma`.
///
/// The mesh is shared and read-only, so copies are cheap and the model can
/// be used from many threads.
class MeasurementModel {
 public:
  MeasurementModel(std::shared_ptr<const TriMesh> mesh, double sigma);

  const TriMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const TriMesh> mesh_ptr() const { return mesh_; }
  double sigma() const { return sigma_; }

  /// -d^2 / (2 sigma^2), d the distance from y to the object posed at x.
  /// The state-independent normalizer is left out.
  double log_likelihood(const Vec3& y, const Pose& x) const;

  /// World-frame surface point of the object posed at x nearest to y.
  /// Depends on y by construction: each hypothesis is mapped to the contact
  /// it would have produced for this particular measurement.
  Vec3 predict_measurement(const Vec3& y, const Pose& x) const;

  /// Distance from y to the object posed at x.
  double distance(const Vec3& y, const Pose& x) const;

 private:
  std::shared_ptr<const TriMesh> mesh_;
  double sigma_;
};

}  // namespace mupf
