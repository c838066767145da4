#ifndef CUSPFLOW_CLI_HPP
#define CUSPFLOW_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace cuspflow {

enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_parse = 2,
  exit_not_unimodular = 3,
  exit_precision = 4,
  exit_precondition = 5,
  exit_consistency = 6,
};

/// Runs the command line (args excludes the program name). Reports go to `out`
/// unless --out is given, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cuspflow

#endif
