#include "uwr/error.hpp"

namespace uwr {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::ZeroReference: return "ZeroReference";
    case ErrorKind::DimsNotDivisible: return "DimsNotDivisible";
    case ErrorKind::MalformedField: return "MalformedField";
    case ErrorKind::GeometryMismatch: return "GeometryMismatch";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::RankDeficientGeometry: return "RankDeficientGeometry";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace uwr
