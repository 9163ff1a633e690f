#pragma once

#include <string>
#include <vector>

namespace attractorlab {

// Runs one command-line invocation (arguments without the program name).
// Returns the process exit status: 0 = pass, 2 = fail, 3 = inconclusive,
// 64 = usage error.
int cli_dispatch(const std::vector<std::string>& args);

}  // namespace attractorlab
