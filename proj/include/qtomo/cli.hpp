#pragma once

// Command-line front end. `run` is the whole program so tests can drive it
// in-process; it never throws and returns the process exit code.

#include <string>
#include <vector>

namespace qtomo::cli {

enum ExitCode : int { ok = 0, input_error = 2, infeasible = 3, numerical = 4 };

int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace qtomo::cli
