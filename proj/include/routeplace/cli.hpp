#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace routeplace {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitDomain = 2 };

/// Runs one subcommand (gen, route, collect, train, predict, eval, place,
/// report). `args` excludes the program name.
int dispatch(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);
int dispatch(int argc, char **argv);

}  // namespace routeplace
