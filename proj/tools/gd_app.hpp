#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gdcli {

// Runs one `gd` invocation. Returns 0 on success, 1 on domain errors and 2 on
// usage errors; errors are reported on `err` as one line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// True if `subcommand` exists and, when `flag` is non-empty, accepts it.
bool knows_flag(const std::string& subcommand, const std::string& flag);

// Every subcommand followed by its long flags, for documentation checks.
std::vector<std::pair<std::string, std::vector<std::string>>> flag_table();

}  // namespace gdcli
