#pragma once

#include <iosfwd>

namespace poshan {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitCheck = 3 };

// Runs one subcommand (derive, split, train, eval, dump-attention,
// dump-patterns, gradcheck). Normal output goes to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace poshan
