#pragma once

#include <string>
#include <vector>

namespace dtc::cli {

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kConfigError = 2 };

// Runs one command line (args[0] is the program name). Diagnostics go to
// stderr; results go to files under --output-dir.
int run(const std::vector<std::string>& args);

}  // namespace dtc::cli
