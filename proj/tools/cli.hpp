#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chordiag::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `chordiag` tool. Returns the process exit code.
int run(int argc, const char* const* argv);

/// Same as above with explicit streams, for tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chordiag::cli
