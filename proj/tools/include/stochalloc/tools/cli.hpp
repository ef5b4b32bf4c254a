#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stochalloc::tools {

/// Runs one invocation; args excludes the program name. Returns the exit
/// code: 0 success, 1 failed command, 2 bad usage.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stochalloc::tools
