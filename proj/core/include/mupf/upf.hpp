#pragma once

#include "mupf/mupf.hpp"

namespace mupf {

/// Plain unscented particle filter iteration: weights from the current
/// measurement only, resampling every step. Kept as a separate code path
/// so the memory filter can be checked against it at m = 1, t0 = 0.
StepDiagnostics upf_step(FilterState& state, const Vec3& y, const MeasurementModel& model,
                         const FilterConfig& config);

}  // namespace mupf
