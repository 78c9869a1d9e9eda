#include "slabsn/error.hpp"

namespace slabsn {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::DefectiveOrIllConditioned: return "DefectiveOrIllConditioned";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::MeshMisaligned: return "MeshMisaligned";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::PointOutOfDomain: return "PointOutOfDomain";
    case ErrorKind::MaxInnerIterations: return "MaxInnerIterations";
    case ErrorKind::MaxOuterIterations: return "MaxOuterIterations";
    case ErrorKind::ShiftAtEigenvalue: return "ShiftAtEigenvalue";
    case ErrorKind::NonpositiveIntegral: return "NonpositiveIntegral";
    case ErrorKind::ZeroFlux: return "ZeroFlux";
  }
  return "Unknown";
}

}  // namespace slabsn
