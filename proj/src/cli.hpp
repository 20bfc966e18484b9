#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace peakheight::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kDomain = 3,
  kConvergence = 4,
};

/// Runs one command line (without the program name). Data goes to `out`,
/// diagnostics to `err`; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace peakheight::cli
