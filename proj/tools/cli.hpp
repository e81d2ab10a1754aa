#pragma once

#include <iosfwd>

#include "nlact/harness.hpp"

namespace nlact::cli {

enum ExitCode : int {
  kSuccess = 0,
  kVerificationFailure = 1,
  kBadArguments = 2,
  kIoError = 3,
};

// 0 when every check passed, kVerificationFailure otherwise.
int exit_code_for(const harness::VerifyReport& report);

// Parses argv, runs the selected experiment and returns a process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nlact::cli
