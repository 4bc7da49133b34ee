#pragma once

#include <string>
#include <vector>

namespace disum {

// Entry point of the command-line tool.  Returns the process exit
// code: 0 on success, 1 on validation or configuration errors, 2 on
// I/O errors.  Diagnostics go to stderr as JSON lines.
int run(int argc, const char* const* argv);

// Convenience overload for tests; args[0] is the program name.
int run(const std::vector<std::string>& args);

}  // namespace disum
