#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace discbench::cli {

/// Runs the command line `args` (program name excluded) and returns the exit
/// code: 0 success, 1 invalid input, 2 when a benchmark trial failed.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses a key = value config file. '#' starts a comment; keys are
/// normalized to lower case with '-' mapped to '_'.
std::map<std::string, std::string> read_config_file(const std::string& path);

std::vector<std::string> split_list(const std::string& text);

}  // namespace discbench::cli
