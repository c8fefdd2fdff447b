#pragma once

#include <string>
#include <vector>

namespace dpcollapse::cli {

/// Runs the command line `args` (args[0] is the program name) and returns the exit code:
/// 0 success, 2 configuration error, 3 numerical or I/O failure, 4 inconclusive statistics.
int run(const std::vector<std::string>& args);

int main_entry(int argc, char** argv);

}  // namespace dpcollapse::cli
