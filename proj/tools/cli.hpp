#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mmt::cli {

// Dispatches one CLI invocation. Returns the process exit code:
// 0 success, 1 usage, 2 parse failure, 3 order violation, 4 no convergence,
// 5 size cap. Structured JSON error reports go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mmt::cli
