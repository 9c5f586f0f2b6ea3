#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ucqrew {

// Exit codes of the `rewrite` subcommand; the others use Ok and InputError only.
enum ExitCode : int {
  Ok = 0,
  BudgetExhausted = 1,
  InputError = 2,
  TimeoutBeforeOutput = 3,
};

// Runs the command line `args` (without the program name). Primary output goes to `out`,
// diagnostics and stats to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ucqrew
