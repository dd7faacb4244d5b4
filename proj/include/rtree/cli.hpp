#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rtree::cli {

/// Runs one `rtree` command. `args` excludes the program name.
/// Exit codes: 0 success or a true verdict, 1 a false verdict or a failed
/// check (witness lines on `err`), 2 usage and parse errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rtree::cli
