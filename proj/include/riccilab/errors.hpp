#pragma once

#include <stdexcept>
#include <string>

namespace riccilab {

enum class ErrorKind {
  BlowUp,
  StepTooLarge,
  OutOfRange,
  PositivityLoss,
  MassDrift,
  NonPositiveOmega,
  NoConvergence,
  TooFewSamples,
  NonPositive,
  Config,
  Admissibility,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so that the harness can
/// map it onto an exit code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Configuration and admissibility problems are user errors; everything
  /// else is a numerical failure.
  bool is_config_error() const noexcept {
    return kind_ == ErrorKind::Config || kind_ == ErrorKind::Admissibility;
  }

 private:
  ErrorKind kind_;
};

}  // namespace riccilab
