#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fvi::cli {

enum ExitCode : int { kSuccess = 0, kNumericalFailure = 1, kUsageError = 2 };

/// Runs the command line `args` (without the program name). CSV goes to `out`
/// unless --output is given; diagnostics and summaries go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "%.17g" formatting used for every number in the CSV output.
std::string format_number(double value);

}  // namespace fvi::cli
