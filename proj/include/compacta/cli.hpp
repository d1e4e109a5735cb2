#pragma once

// Command-line surface:
//
//   compacta coeffs|simulate|classify|sweep|limit|audit --config <path>
//            [--backend paper|first-principles] [--out <dir>] [--jobs N]
//
// Exit codes: 0 success, 2 validation, 3 singular configuration,
// 4 oracle failure, 5 operation undefined in the current regime, 1 anything
// else. COMPACTA_LOG (trace, debug, info, warn, error, off) sets the
// diagnostic level on stderr; the default is warn.

#include <iosfwd>
#include <string>
#include <vector>

namespace compacta {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitValidation = 2,
  kExitSingular = 3,
  kExitOracle = 4,
  kExitRegime = 5,
};

// `args` excludes the program name. Reports go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace compacta
