#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace entqkd::cli {

// Runs the command line given argv-style arguments (without the program
// name). Returns the process exit code: 0 success, 1 domain/runtime error,
// 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace entqkd::cli
