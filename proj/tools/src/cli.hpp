#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dfocast::cli {

/// Runs one dfocast invocation. `args` excludes the program name. Returns the
/// process exit status: 0 success, 1 runtime failure, 2 bad config or usage,
/// 3 data or I/O failure. Failures also print a one-line JSON error to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dfocast::cli
