#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qcurve {

enum class ErrorKind {
  NonDivisible,
  ZeroInput,
  NotPrime,
  InvalidTriple,
  DegenerateCurve,
  SampleFailure,
  UnreachableParity,
  NotImplementedBranch,
  OddInduced,
  TrivialSolution,
  ParityViolation,
  NotExactDivisor,
  BadDivisibility,
  PrecisionExhausted,
  ToleranceNotMet,
  NonCoprimeConductor,
  InsufficientCoefficients,
  AmbiguousSign,
  SingularGram,
  TruncationTooCoarse,
  BelowThresholdPrime,
  PreconditionPrime,
  BudgetExceeded,
  SchemaMismatch,
  CorruptRecord,
  UnsupportedLevel,
  InvalidArgument,
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonDivisible: return "NonDivisible";
    case ErrorKind::ZeroInput: return "ZeroInput";
    case ErrorKind::NotPrime: return "NotPrime";
    case ErrorKind::InvalidTriple: return "InvalidTriple";
    case ErrorKind::DegenerateCurve: return "DegenerateCurve";
    case ErrorKind::SampleFailure: return "SampleFailure";
    case ErrorKind::UnreachableParity: return "UnreachableParity";
    case ErrorKind::NotImplementedBranch: return "NotImplementedBranch";
    case ErrorKind::OddInduced: return "OddInduced";
    case ErrorKind::TrivialSolution: return "TrivialSolution";
    case ErrorKind::ParityViolation: return "ParityViolation";
    case ErrorKind::NotExactDivisor: return "NotExactDivisor";
    case ErrorKind::BadDivisibility: return "BadDivisibility";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorKind::NonCoprimeConductor: return "NonCoprimeConductor";
    case ErrorKind::InsufficientCoefficients: return "InsufficientCoefficients";
    case ErrorKind::AmbiguousSign: return "AmbiguousSign";
    case ErrorKind::SingularGram: return "SingularGram";
    case ErrorKind::TruncationTooCoarse: return "TruncationTooCoarse";
    case ErrorKind::BelowThresholdPrime: return "BelowThresholdPrime";
    case ErrorKind::PreconditionPrime: return "PreconditionPrime";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::CorruptRecord: return "CorruptRecord";
    case ErrorKind::UnsupportedLevel: return "UnsupportedLevel";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the ErrorKind tags.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qcurve
