#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace erasure::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 2,
  kSingular = 3,
  kSimulationDegenerate = 4,
  kFitFailure = 5,
};

/// Environment variable that overrides the default output directory.
inline constexpr const char* kOutDirEnv = "ERASURE_OUT_DIR";

/// Runs one invocation; args[0] is the program name. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace erasure::cli
