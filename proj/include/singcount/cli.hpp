#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace singcount {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBudget = 3;

/// Runs one `singcount` invocation. `args` excludes the program name.
/// Results go to `out`, diagnostics and warnings to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace singcount
