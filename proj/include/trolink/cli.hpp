#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trolink::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Runs one command. args[0] is the program name. Returns the exit code:
/// 0 every check passed, 1 a mathematical check failed, 2 invalid input.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace trolink::cli
