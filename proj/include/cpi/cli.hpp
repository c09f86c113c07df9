#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cpi {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInconsistent = 2;
inline constexpr int kExitTotalConflict = 3;

/// Runs the command line `args` (args[0] is the program name). `in` backs the
/// `-` input path.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace cpi
