#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace relwave {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitValidation = 2 };

/// Runs one `relwave` invocation. `args` excludes the program name. The
/// one-line JSON summary goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv);

}  // namespace relwave
