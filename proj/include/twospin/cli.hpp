#pragma once

// Command-line front end. Every command prints one JSON document
//
//     {"command": ..., "inputs_digest": ..., "outputs": {...}, "wall_time_s": ...}
//
// on stdout, except `decay`, which prints CSV. Diagnostics go to stderr.

#include <ostream>

namespace twospin {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitPrecondition = 2, kExitBudget = 3 };

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace twospin
