#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace senergy::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitViolation = 2;

// Entry point of the senergy command line tool. args excludes the program
// name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace senergy::cli
