#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace palm::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kMaxOuterExceeded = 2,
  kSolverFailure = 3,
  kNoFeasiblePoint = 4,
};

/// Entry point of `palm-bilevel`; `args` excludes the program name.
/// Reports go to `out` as one JSON document, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace palm::cli
