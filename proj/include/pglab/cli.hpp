#pragma once

#include <string>
#include <vector>

namespace pglab {

// Full command-line entry point; returns the process exit status.
// Exit codes: 0 success (and all embedded checks passed), 1 runtime or
// check failure, 2 configuration/usage error.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

}  // namespace pglab
