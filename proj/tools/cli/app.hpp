#pragma once

#include <ostream>

namespace cvqkd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitConfigError = 2;

/// Entry point of the `cvqkd` tool. Subcommands: rate, threshold, optimize,
/// sweep, figure, validate. Results go to `out` unless --out names a file.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cvqkd::cli
