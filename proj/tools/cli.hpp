#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace snnrpn::cli {

// Runs the command line `args` (without the program name). Normal output goes
// to `out`, diagnostics and usage text to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace snnrpn::cli
