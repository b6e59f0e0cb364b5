#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace stp::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,   // bad flags or parameter values
  kDataError = 3,     // unreadable or invalid scenario/report files
  kRuntimeError = 4,
};

/// Entry point of the `stp` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stp::cli
