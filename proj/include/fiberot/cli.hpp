#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fiberot {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitUncertified = 3;

/// Runs one command line (args excludes the program name). Reports go to
/// `out` unless -o is given; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fiberot
