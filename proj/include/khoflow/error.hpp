#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace khoflow {

enum class ErrorKind {
  MalformedToken,
  InconsistentStrands,
  DisconnectedNumbering,
  VertexLengthMismatch,
  BasepointOnCrossing,
  NoCrossings,
  CrossingOutOfRange,
  NotASubspace,
  CircleMismatch,
  TooManyCrossings,
  DisconnectedDiagram,
  InvalidPage,
  CutoffTooSmall,
  UnknownModel,
  InvalidModel,
  UnknownDiagram,
  InvalidArgument,
  InvariantViolation,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MalformedToken: return "MalformedToken";
    case ErrorKind::InconsistentStrands: return "InconsistentStrands";
    case ErrorKind::DisconnectedNumbering: return "DisconnectedNumbering";
    case ErrorKind::VertexLengthMismatch: return "VertexLengthMismatch";
    case ErrorKind::BasepointOnCrossing: return "BasepointOnCrossing";
    case ErrorKind::NoCrossings: return "NoCrossings";
    case ErrorKind::CrossingOutOfRange: return "CrossingOutOfRange";
    case ErrorKind::NotASubspace: return "NotASubspace";
    case ErrorKind::CircleMismatch: return "CircleMismatch";
    case ErrorKind::TooManyCrossings: return "TooManyCrossings";
    case ErrorKind::DisconnectedDiagram: return "DisconnectedDiagram";
    case ErrorKind::InvalidPage: return "InvalidPage";
    case ErrorKind::CutoffTooSmall: return "CutoffTooSmall";
    case ErrorKind::UnknownModel: return "UnknownModel";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::UnknownDiagram: return "UnknownDiagram";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
/// InvariantViolation marks a broken internal guarantee; all other kinds are
/// input errors.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  bool is_input_error() const noexcept { return kind_ != ErrorKind::InvariantViolation; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void ensure(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::InvariantViolation, what);
}

}  // namespace khoflow
