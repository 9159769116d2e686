#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tsfrac {

/// Run the command-line front end. args excludes the program name. Returns
/// the process exit code: 0 on success, 1 on numeric failure, 2 on config or
/// usage errors. All output goes through the given streams.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace tsfrac
