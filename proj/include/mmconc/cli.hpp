#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mmconc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitRefused = 2;

/// Runs one subcommand. `args` excludes the program name. Reports go to
/// `out` (or --out), messages to `err`. Returns 0 on success, 1 on input
/// errors, 2 when a budget or precondition refuses the request.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mmconc
