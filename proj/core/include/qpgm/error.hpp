#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qpgm {

enum class ErrorKind {
  InvalidOperator,
  NotPositiveSemidefinite,
  DimMismatch,
  DenseBlowup,
  InvalidAlpha,
  EmptyClass,
  InvalidArgument,
  StratificationImpossible,
  ClassSmallerThanK,
  LabelOutOfRange,
  EmptyEvaluation,
  ClassSetMismatch,
  MetricSetMismatch,
  ParseError,
  SchemaMismatch,
  FingerprintMismatch,
  IoError,
  GridSearchFailed,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure surfaced by the library carries a kind so callers (the CLI in
// particular) can map it to an exit code without parsing messages.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

private:
  ErrorKind kind_;
  std::string detail_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidOperator: return "InvalidOperator";
    case ErrorKind::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::DenseBlowup: return "DenseBlowup";
    case ErrorKind::InvalidAlpha: return "InvalidAlpha";
    case ErrorKind::EmptyClass: return "EmptyClass";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::StratificationImpossible: return "StratificationImpossible";
    case ErrorKind::ClassSmallerThanK: return "ClassSmallerThanK";
    case ErrorKind::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorKind::EmptyEvaluation: return "EmptyEvaluation";
    case ErrorKind::ClassSetMismatch: return "ClassSetMismatch";
    case ErrorKind::MetricSetMismatch: return "MetricSetMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::FingerprintMismatch: return "FingerprintMismatch";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::GridSearchFailed: return "GridSearchFailed";
  }
  return "Unknown";
}

}  // namespace qpgm
