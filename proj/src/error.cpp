// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#include "amscov/error.hpp"

namespace amscov {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::UnknownSignal: return "UnknownSignal";
    case ErrorCode::TraceTooShort: return "TraceTooShort";
    case ErrorCode::NoPairs: return "NoPairs";
    case ErrorCode::UnknownCoverPoint: return "UnknownCoverPoint";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::CorruptDatabase: return "CorruptDatabase";
    case ErrorCode::SingularKernel: return "SingularKernel";
    case ErrorCode::NegativeSigma: return "NegativeSigma";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::SimulatorError: return "SimulatorError";
  }
  return "Unknown";
}

}  // namespace amscov
