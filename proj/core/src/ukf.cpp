#include "mupf/ukf.hpp"

namespace mupf {

UkfResult ukf_step(const Particle& particle, const Vec3& y, const MeasurementModel& model,
                   const Mat6& q, const Mat3& r, const SutParams& sut) {
  const Vec6& x_pred = particle.mean;
  const Mat6 p_pred = particle.cov + q;
  return ukf_correct(x_pred, p_pred, y, r, sut, [&](const Vec6& x) -> Vec3 {
    return model.predict_measurement(y, Pose::from_vector(x));
  });
}

}  // namespace mupf
