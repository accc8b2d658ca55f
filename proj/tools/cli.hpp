#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "run_spec.hpp"

namespace toda::cli {

inline constexpr int exit_success = 0;
inline constexpr int exit_engine_error = 1;
inline constexpr int exit_verification_failure = 2;

/// Parses the arguments after the program name. Throws UsageError.
RunSpec parse_run_spec(const std::vector<std::string>& args);

/// Runs a validated run spec, writing the report to `out` (or the run spec's output
/// file) and diagnostics to `err`. Returns the process exit code.
int execute(const RunSpec& spec, std::ostream& out, std::ostream& err);

/// parse_run_spec + execute; usage errors exit with exit_engine_error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace toda::cli
