#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace sparsetree::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable naming the default directory for result files.
inline constexpr const char* kOutputDirEnv = "SPARSETREE_OUTPUT_DIR";

/// Entry point shared by the executable and the tests. `args` excludes the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace sparsetree::cli
