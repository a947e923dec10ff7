#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace platopt {

enum ExitCode : int {
    kExitOk = 0,
    kExitUser = 1,    // validation or usage error
    kExitSolver = 2,  // a window could not be solved
    kExitIo = 3,
};

/// Entry point of the command-line tool. `args` excludes the program name.
/// Failures print one JSON error record on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace platopt
