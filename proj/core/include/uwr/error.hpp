#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uwr {

enum class ErrorKind {
  NotPositiveDefinite,
  ZeroReference,
  DimsNotDivisible,
  MalformedField,
  GeometryMismatch,
  ShapeMismatch,
  EmptyMask,
  TooFewSamples,
  RankDeficientGeometry,
  Diverged,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace uwr
