#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kthin::cli {

/// Exit codes.
enum Exit : int { ok = 0, input_error = 1, unbounded = 2, budget = 3, verification_failure = 4 };

/// Runs one command line (args excludes the program name). JSON and
/// generated files go to `out` unless redirected by flags; diagnostics go
/// to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kthin::cli
