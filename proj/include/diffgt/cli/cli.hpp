#pragma once

#include <string>
#include <vector>

namespace diffgt {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 2,
  kExitDivergence = 3,
  kExitIntegrity = 4,
};

/// Runs one `diffgt` command (ingest, train, evaluate, diagnose, ablate) and
/// returns its exit code. Errors are reported on stderr.
int run_cli(const std::vector<std::string>& args);

}  // namespace diffgt
