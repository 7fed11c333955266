#pragma once

#include <iosfwd>

namespace llb {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitSolver = 2, kExitDissipation = 3 };

/// Entry point of the `llb` tool. Subcommands: run, rates, decay, check.
/// Errors print one line "ERROR <code>: <message>" to `err`.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace llb
