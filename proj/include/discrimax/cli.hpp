#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace discrimax {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOptimal = 0,
  kExitConfigError = 1,
  kExitNumericalFailure = 2,
  kExitNotOptimal = 3,
};

/// Runs one command (args excludes the program name):
///   solve <config> -o <out.json> [--n-obs N]
///   verify <config> --design <file|literal> [--csv <path>]
///   efficiency <config> --designs <a.json> <b.json> ... --criteria T,KL,SKL_A [-o <out.json>]
///   sensitivity <config> --design <file|literal> --csv <path>
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace discrimax
