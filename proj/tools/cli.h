#ifndef CROSSFIRE_TOOLS_CLI_H
#define CROSSFIRE_TOOLS_CLI_H

#include <iosfwd>

namespace crossfire::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;        // bad config, flags or input files
inline constexpr int kExitIncompatible = 3;  // model and data do not fit
inline constexpr int kExitRuntime = 4;

// Entry point of the `crossfire` tool; diagnostics go to `err`.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace crossfire::cli

#endif  // CROSSFIRE_TOOLS_CLI_H
