#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace orddid {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitData = 3, kExitNumeric = 4 };

/// Runs one command line (without the program name). Results go to `out`
/// or to the --output file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace orddid
