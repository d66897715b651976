#pragma once

#include <string>
#include <vector>

namespace nf {

// Exit statuses of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,  // unexpected error
    kExitUsage = 2,    // bad flags / unknown subcommand
    kExitIo = 3,       // unreadable or unwritable paths
    kExitData = 4,     // CSV schema or parse errors, malformed model files
    kExitNumeric = 5,  // training or evaluation errors
};

// Runs one CLI invocation. `args` excludes the program name. Diagnostics go
// to stderr, one line per failure.
int run_cli(std::vector<std::string> args);

} // namespace nf
