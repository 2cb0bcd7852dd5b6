#include "mom/error.hpp"

namespace mom {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ManifoldMismatch: return "ManifoldMismatch";
    case ErrorKind::UnsupportedMetric: return "UnsupportedMetric";
    case ErrorKind::InvalidPoint: return "InvalidPoint";
    case ErrorKind::InvalidTangent: return "InvalidTangent";
    case ErrorKind::BasePointMismatch: return "BasePointMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::CutLocus: return "CutLocus";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::OutOfBall: return "OutOfBall";
    case ErrorKind::InvalidGroupCount: return "InvalidGroupCount";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::ProjectionUndefined: return "ProjectionUndefined";
    case ErrorKind::InadmissibleAlpha: return "InadmissibleAlpha";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::GroupTooSmall: return "GroupTooSmall";
    case ErrorKind::RejectionBudgetExceeded: return "RejectionBudgetExceeded";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DegenerateShape: return "DegenerateShape";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what, int group)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what),
      kind_(kind),
      group_(group) {}

}  // namespace mom
