#pragma once

#include <iosfwd>

namespace gew::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitInvalidState = 2;

/// Entry point of the `gew` tool. Writes results to `out` (or the --out
/// file) and diagnostics to `err`; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gew::cli
