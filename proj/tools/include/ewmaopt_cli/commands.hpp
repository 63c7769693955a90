#pragma once

#include <vector>

#include "ewmaopt_cli/config.hpp"
#include "ewmaopt_cli/csv.hpp"

namespace ewmaopt::cli {

enum ExitCode : int { kOk = 0, kInvalidArguments = 2, kNumericalFailure = 3, kPartialTable = 4 };

struct CommandResult {
  std::vector<CsvTable> tables;
  int exit_code = kOk;
};

/// Runs the command named by config key `command`. Throws
/// std::invalid_argument for bad input and NumericalError subclasses for
/// evaluator failures.
CommandResult execute(const RunConfig& config);

/// Full command-line entry point: parse, execute, write, map errors to exit codes.
int run(int argc, char** argv);

}  // namespace ewmaopt::cli
