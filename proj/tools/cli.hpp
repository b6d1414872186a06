#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pfacap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (without the program name). Normal output goes to
/// `out`, the single-line diagnostic of a failure to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pfacap::cli
