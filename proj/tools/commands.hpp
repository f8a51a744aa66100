#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace replisum::cli {

/// Runs one command line (arguments after the program name). Results are
/// written to `out` and diagnostics to `err`. Returns the process exit code:
/// 0 success, 1 usage or domain error, 2 data error, 3 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace replisum::cli
