#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aoc {

enum ExitCode : int
{
  kExitOk = 0,
  kExitUsage = 1,
  kExitValidation = 2,
  kExitNumeric = 3,
  kExitNoConvergence = 4,
};

/// Entry point of the `aoc` tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aoc
