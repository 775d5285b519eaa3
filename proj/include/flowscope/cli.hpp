#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace flowscope {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Runs one `flowscope` command line (args[0] is the program name). Output
// that is not redirected to a file goes to `out`; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flowscope
