#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mom {

enum class ErrorKind {
  ManifoldMismatch,
  UnsupportedMetric,
  InvalidPoint,
  InvalidTangent,
  BasePointMismatch,
  DimensionMismatch,
  CutLocus,
  DegenerateInput,
  OutOfBall,
  InvalidGroupCount,
  NotConverged,
  ProjectionUndefined,
  InadmissibleAlpha,
  DomainError,
  GroupTooSmall,
  RejectionBudgetExceeded,
  ParseError,
  DegenerateShape,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. `group()` is set when the failure
/// happened inside one subset of a median-of-means computation.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, int group = -1);

  ErrorKind kind() const noexcept { return kind_; }
  int group() const noexcept { return group_; }

 private:
  ErrorKind kind_;
  int group_;
};

}  // namespace mom
