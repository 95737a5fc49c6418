#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace probebench::cli {

enum ExitStatus : int {
  kSuccess = 0,
  kUsageError = 1,
  kDataError = 2,
  kRuntimeFailure = 3,
};

// Entry point of the `probe_bench` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace probebench::cli
