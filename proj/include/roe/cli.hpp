#pragma once

#include <ostream>

namespace roe {

// Exit statuses of the command-line front end.
enum ExitStatus : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitParseError = 2,
  kExitPrecondition = 3,
};

// Runs one subcommand. The report goes to `out` (and to <out>/<command>.report
// when --out is given); failures also print a "FAIL: ..." line to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace roe
