#pragma once

#include <stdexcept>
#include <string>

namespace avwc {

// Error taxonomy. Kinds map onto CLI exit codes: validation-type errors
// exit with 2, enumeration/guard limits with 3.
enum class ErrorKind {
  NegativeEntry,
  RowSumViolation,
  DimensionMismatch,
  AlphabetMismatch,
  LengthMismatch,
  InconsistentCounts,
  NTooSmall,
  OutOfRange,
  OptimizerDidNotConverge,
  SolverFailure,
  UnsupportedR,
  NonpositiveG,
  EmptyTypeClass,
  BlocklengthTooLarge,
  HypothesisViolated,
  PreconditionNotSymmetrizable,
  ParseError,
  ValidationError,
  MissingEveLink,
  UnknownCommand,
  UnknownExample,
  EpsOutOfRange,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::RowSumViolation: return "RowSumViolation";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::InconsistentCounts: return "InconsistentCounts";
    case ErrorKind::NTooSmall: return "NTooSmall";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::OptimizerDidNotConverge: return "OptimizerDidNotConverge";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::UnsupportedR: return "UnsupportedR";
    case ErrorKind::NonpositiveG: return "NonpositiveG";
    case ErrorKind::EmptyTypeClass: return "EmptyTypeClass";
    case ErrorKind::BlocklengthTooLarge: return "BlocklengthTooLarge";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::PreconditionNotSymmetrizable: return "PreconditionNotSymmetrizable";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::MissingEveLink: return "MissingEveLink";
    case ErrorKind::UnknownCommand: return "UnknownCommand";
    case ErrorKind::UnknownExample: return "UnknownExample";
    case ErrorKind::EpsOutOfRange: return "EpsOutOfRange";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // true for guard/limit errors (CLI exit 3), false for validation (exit 2)
  bool is_limit() const noexcept {
    return kind_ == ErrorKind::BlocklengthTooLarge;
  }

private:
  ErrorKind kind_;
};

} // namespace avwc
