#pragma once

namespace nstorus {

/// Exit status of the command line tool.
enum ExitCode : int {
  exit_ok = 0,
  exit_check_failed = 1,  ///< verify found a violated invariant
  exit_usage = 2,         ///< bad flags or malformed configuration
  exit_blowup = 3,        ///< numerical blowup; partial outputs are on disk
};

/// Subcommands: simulate, picard, verify, ensemble, compactness, lipschitz.
int run_cli(int argc, char** argv);

}  // namespace nstorus
