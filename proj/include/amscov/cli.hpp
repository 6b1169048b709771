// Copyright 2026 The amscov Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace amscov::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,    ///< bad flags, unreadable or invalid config
  kRuntime = 2,  ///< evaluation or simulation failure
  kBugHit = 3,   ///< an illegal bin was reached
};

/// Entry point behind the `amscov` binary. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace amscov::cli
