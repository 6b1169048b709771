// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace amscov {

enum class ErrorCode {
  InvalidArgument,
  ParseError,
  OutOfDomain,
  OutOfRange,
  UnknownSignal,
  TraceTooShort,
  NoPairs,
  UnknownCoverPoint,
  IoError,
  CorruptDatabase,
  SingularKernel,
  NegativeSigma,
  StepTooLarge,
  SimulatorError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace amscov
