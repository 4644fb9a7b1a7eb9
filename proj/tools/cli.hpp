#pragma once
#include <iosfwd>

namespace bisampler::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the command-line tool; never calls std::exit.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace bisampler::cli
