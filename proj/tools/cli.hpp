#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace recasm::cli {

enum Exit : int {
  ok = 0,
  failure = 1,  // parse error, malformed trace, bad arguments
  inconsistent_halt = 2,
  budget_exhausted = 3,
  check_violation = 4,
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace recasm::cli
