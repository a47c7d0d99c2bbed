#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace moments::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNoMeasure = 1;
inline constexpr int kExitApproximable = 2;
inline constexpr int kExitInconclusive = 3;
inline constexpr int kExitInput = 64;

// Runs the tool on argv-style arguments (without the program name). Reports go to out, errors to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace moments::cli
