#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wbp::app {

enum ExitCode : int {
  exit_ok = 0,
  exit_bad_input = 1,
  exit_non_convergence = 2,
  exit_size_guard = 3,
  exit_internal = 4,
};

/// The `wbp` command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wbp::app
