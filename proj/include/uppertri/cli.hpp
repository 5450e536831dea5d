#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uppertri::cli {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kInfeasible = 2,
  kInputError = 3,
  kConvergenceFailure = 4,
};

/// Runs the command line; args excludes the program name. Reports go to
/// `out`, diagnostics and usage to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uppertri::cli
