#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slabsn {

enum class ErrorKind {
  InvalidArgument,
  Parse,
  Validation,
  DefectiveOrIllConditioned,
  Overflow,
  MeshMisaligned,
  SingularSystem,
  PointOutOfDomain,
  MaxInnerIterations,
  MaxOuterIterations,
  ShiftAtEigenvalue,
  NonpositiveIntegral,
  ZeroFlux,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (and the CLI)
/// can react without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for errors caused by bad user input rather than numerics.
  bool is_input_error() const noexcept {
    return kind_ == ErrorKind::Parse || kind_ == ErrorKind::Validation ||
           kind_ == ErrorKind::InvalidArgument;
  }

 private:
  ErrorKind kind_;
};

}  // namespace slabsn
