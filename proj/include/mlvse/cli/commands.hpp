#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mlvse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

// Entry point of the command-line harness. args[0] is the program name.
// Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mlvse::cli
