#include "mupf/error.hpp"

namespace mupf {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyMesh: return "EmptyMesh";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::SingularInnovation: return "SingularInnovation";
    case ErrorCode::DegenerateWeights: return "DegenerateWeights";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidFaceSubset: return "InvalidFaceSubset";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace mupf
