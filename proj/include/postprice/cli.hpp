#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace postprice {

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_config = 2 };

/// Runs one command line; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace postprice
