#pragma once

#include <stdexcept>
#include <string>

namespace covreg {

enum class ErrorKind {
  NumericalFailure,
  SingularMatrix,
  NotPSD,
  RankMismatch,
  RankTooLarge,
  DimensionMismatch,
  NoConvergence,
  NonPositiveDiagonal,
  DegenerateDesign,
  InvalidArgument,
  Format,
};

[[nodiscard]] inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::RankMismatch: return "RankMismatch";
    case ErrorKind::RankTooLarge: return "RankTooLarge";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NonPositiveDiagonal: return "NonPositiveDiagonal";
    case ErrorKind::DegenerateDesign: return "DegenerateDesign";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Format: return "Format";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind; the
/// message always starts with the kind name so it survives being re-wrapped.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

  /// Input-validation problems (bad arguments, malformed files) as opposed to
  /// failures of the numerics on valid input.
  [[nodiscard]] bool is_usage_error() const noexcept {
    return kind_ == ErrorKind::InvalidArgument || kind_ == ErrorKind::Format;
  }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace covreg
