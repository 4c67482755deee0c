#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sedna::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kBadInput = 2;

/// Runs the sedna command line (args exclude the program name). CSV goes to
/// `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sedna::cli
