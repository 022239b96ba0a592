#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rbmld::cli {

// Exit statuses.
inline constexpr int exit_ok = 0;
inline constexpr int exit_verify_failed = 1;
inline constexpr int exit_validation = 2;
inline constexpr int exit_numeric = 3;

// Parses `args` (without the program name) and dispatches.  Tables go to
// `out` unless --out names a file; usage and errors go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace rbmld::cli
