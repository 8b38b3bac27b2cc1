#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dvino {

enum class ErrorKind {
  InvalidArgument,
  NotSquarefree,
  BadFactor,
  NotCoprime,
  BoundTooLarge,
  EmptyResidues,
  BadK,
  HypothesisUnmet,
  NoWitness,
  BadShape,
  TooLarge,
  ParityMismatch,
  EmptySet,
  NotPrime,
  BoundMismatch,
  Overflow,
  NoPrimeInInterval,
  PipelineDegenerate,
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotSquarefree: return "NotSquarefree";
    case ErrorKind::BadFactor: return "BadFactor";
    case ErrorKind::NotCoprime: return "NotCoprime";
    case ErrorKind::BoundTooLarge: return "BoundTooLarge";
    case ErrorKind::EmptyResidues: return "EmptyResidues";
    case ErrorKind::BadK: return "BadK";
    case ErrorKind::HypothesisUnmet: return "HypothesisUnmet";
    case ErrorKind::NoWitness: return "NoWitness";
    case ErrorKind::BadShape: return "BadShape";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::ParityMismatch: return "ParityMismatch";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::NotPrime: return "NotPrime";
    case ErrorKind::BoundMismatch: return "BoundMismatch";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::NoPrimeInInterval: return "NoPrimeInInterval";
    case ErrorKind::PipelineDegenerate: return "PipelineDegenerate";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so the
/// CLI can map it to a structured error record.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace dvino
