#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace expcomp {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kFitFailure = 2;
inline constexpr int kReplayMismatch = 3;
}  // namespace exit_code

/// Runs the command line `args` (program name excluded) and returns the exit
/// status. Human-readable output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace expcomp
