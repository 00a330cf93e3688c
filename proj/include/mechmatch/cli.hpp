#pragma once

// Command-line front end tying together instance generation, one-shot
// solves, the audit suites, the conjecture hunt, and corpus
// materialization.

namespace mechmatch {

// Full argv dispatch. Returns the process exit status: 0 success, 1 usage
// or input error (one "error: ..." line on stderr), 2 mathematical finding
// (a strategyproofness violation or a failed fixture).
int run_cli(int argc, const char* const* argv);

}  // namespace mechmatch
