#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fpt::cli {

enum ExitStatus : int {
  kOk = 0,
  kVerificationFailed = 1,
  kInputError = 2,
  kEngineFailure = 3,
};

/// Entry point of the floquet-pt tool. args[0] is the program name. Reports
/// go to the output directory; human-readable summaries to out, diagnostics
/// to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fpt::cli
