#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace reservations::cli {

enum ExitCode : int {
  kOk = 0,
  kParseError = 2,
  kRangeError = 3,
  kMissingDependency = 4,
};

/// Runs the command line (args[0] is the program name). Writes results to `out` unless an
/// --output/--report file is given, diagnostics to `err`, and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace reservations::cli
