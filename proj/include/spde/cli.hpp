#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spde {

// Runs the spde command line given argv-style arguments (excluding argv[0]).
// JSON goes to `out`, diagnostics to `err`. Returns the process exit code:
// 0 computed/PASS, 2 verdict FAIL/DIVERGENT, 1 usage or config error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spde
