#pragma once

// The `banachproj` command runner: one JSON config in, one JSON (or CSV)
// report out, and an exit code that says whether every requested check passed.

#include "banachproj/json_io.hpp"

#include <iosfwd>

namespace banachproj {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitMalformed = 2,
  kExitInfeasible = 3,
  kExitNonConvergence = 4,
};

/// Runs a parsed config. Reports go to config["output_path"] when present,
/// otherwise to `out`; diagnostics go to `err`.
int run_config(const Json& config, std::ostream& out, std::ostream& err);

/// `banachproj [command] --config PATH [--seed N] [--out PATH]`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// BANACHPROJ_THREADS if set to a positive integer, else the hardware count.
unsigned configured_threads();

}  // namespace banachproj
