#pragma once

#include <iosfwd>

namespace elect::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Parses argv and runs one subcommand. Results go to `out`, diagnostics and
// usage text to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace elect::cli
