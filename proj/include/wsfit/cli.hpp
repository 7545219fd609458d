#pragma once

#include <string>
#include <vector>

namespace wsfit::cli {

// Exit codes returned by dispatch().
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;    // unexpected error
inline constexpr int kExitUsage = 2;      // bad flags / unknown subcommand
inline constexpr int kExitInput = 3;      // missing or malformed input data
inline constexpr int kExitNumerical = 4;  // solver / quadrature failure

// Runs one subcommand (zeros, potential, solve, sweep, report, count).
// args excludes the program name. Every emitted file is listed in a
// .manifest.json written next to the first output of the run.
int dispatch(const std::vector<std::string>& args);

}  // namespace wsfit::cli
