#pragma once

#include <string>

namespace bir::test {

struct RunResult {
  int exitCode = -1;
  std::string out;
  std::string err;
};

/// Runs `command` through the shell, capturing stdout and stderr separately.
/// exitCode is -1 when the child did not terminate normally.
RunResult runCommand(const std::string& command);

/// Single-quotes `arg` for safe interpolation into a shell command line.
std::string quoteArg(const std::string& arg);

}  // namespace bir::test
