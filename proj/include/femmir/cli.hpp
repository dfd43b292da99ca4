#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace femmir {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitEmpty = 3,
};

/// Bundled data directory: $FEMMIR_DATA when set, else the build-time path.
std::filesystem::path data_dir();

/// Runs one subcommand (args exclude the program name). Data goes to `out`
/// unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace femmir
