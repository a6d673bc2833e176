#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace secount::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kResourceLimit = 3 };

/// Runs the command line `args` (without the program name). Normal output
/// goes to `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace secount::cli
