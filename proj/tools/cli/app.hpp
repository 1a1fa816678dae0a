#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace adapt::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,  // runtime failure (infeasible split, I/O error while writing, ...)
  kUsage = 2,    // bad flags or config, missing input file
};

/// Runs one command. `args` excludes the program name. Normal output goes to
/// `out`; diagnostics and logs go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adapt::cli
