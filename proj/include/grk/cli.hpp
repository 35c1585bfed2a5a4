#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace grk {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitUnwritable = 4;

/// Runs one grkbench subcommand. args excludes the program name.
/// Reports go to `out`, diagnostics and usage text to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(int argc, char** argv);

}  // namespace grk
