#include "riccilab/errors.hpp"

namespace riccilab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BlowUp: return "BlowUp";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::PositivityLoss: return "PositivityLoss";
    case ErrorKind::MassDrift: return "MassDrift";
    case ErrorKind::NonPositiveOmega: return "NonPositiveOmega";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::NonPositive: return "NonPositive";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::Admissibility: return "AdmissibilityError";
  }
  return "UnknownError";
}

}  // namespace riccilab
