#pragma once

#include <iosfwd>

namespace cat0lab::cli {

/// Process exit codes.
enum ExitCode : int {
  kPassed = 0,
  kViolation = 1,  // a mathematical check failed or a solve did not converge
  kConfigError = 2,
};

/// Parses the command line and runs one subcommand (audit, iterate,
/// fixedpoint, bounds, suggest). Results go to `out` as JSON (and to files
/// under --out); diagnostics go to `err`. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cat0lab::cli
