#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace semprobe {

/// Parses and runs one invocation. Returns the process exit code:
/// 0 success, 1 usage/IO/training error, 2 degenerate data.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace semprobe
