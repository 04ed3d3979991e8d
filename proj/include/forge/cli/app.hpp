#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "forge/cli/config.hpp"

namespace forge::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitPartial = 2,  // some input or output is missing or failed
    kExitEnvironment = 3,
};

// Runs the command line `args` (args[0] is the program name). Never throws;
// errors are reported on `err` and mapped to an exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env = process_env());

}  // namespace forge::cli
