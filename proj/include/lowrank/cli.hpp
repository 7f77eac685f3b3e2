#pragma once

// Command-line front end: `run`, `compare` and `check` subcommands.
//
// Exit codes: 0 epsilon reached (or success), 1 failed acceptance check,
// 2 max iterations, 3 backtracking failed, 64 bad usage, 66 unwritable output.

#include <ostream>

namespace lowrank::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitMaxIters = 2;
inline constexpr int kExitBacktrackFailed = 3;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitCantCreate = 66;

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lowrank::cli
