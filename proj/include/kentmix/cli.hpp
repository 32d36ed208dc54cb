#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kentmix {

/// Exit codes of the command-line driver.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

/// Runs the `kentmix` command line. args[0] is the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kentmix
