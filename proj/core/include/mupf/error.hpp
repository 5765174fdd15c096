#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mupf {

enum class ErrorCode {
  EmptyMesh,
  NotPositiveDefinite,
  SingularInnovation,
  DegenerateWeights,
  InvalidConfig,
  InvalidFaceSubset,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for errors caused by bad user input rather than numerical failure.
  bool is_validation() const noexcept {
    return code_ == ErrorCode::InvalidConfig || code_ == ErrorCode::InvalidFaceSubset ||
           code_ == ErrorCode::EmptyMesh || code_ == ErrorCode::Io;
  }

 private:
  ErrorCode code_;
};

}  // namespace mupf
