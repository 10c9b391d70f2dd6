#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cvr {

enum class ErrorKind {
  DimensionTooSmall,
  InvalidParameter,
  ShapeMismatch,
  NotBipartite,
  NotTracePreserving,
  NotPSD,
  GridTooCoarse,
  OutsideSupport,
  NoClosedForm,
  TruncationUnsound,
  Infeasible,
  ZeroWitness,
  InvariantViolation,
  Schema,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` carries the failure class
/// so callers (and the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NotBipartite: return "NotBipartite";
    case ErrorKind::NotTracePreserving: return "NotTracePreserving";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::OutsideSupport: return "OutsideSupport";
    case ErrorKind::NoClosedForm: return "NoClosedForm";
    case ErrorKind::TruncationUnsound: return "TruncationUnsound";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::ZeroWitness: return "ZeroWitness";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::Schema: return "Schema";
  }
  return "Unknown";
}

}  // namespace cvr
