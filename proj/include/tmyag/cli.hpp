#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tmyag::cli {

inline constexpr const char* kVersion = "1.0.0";

/// Runs the command line `args` (without the program name). Results go to
/// `out` unless -o/--output names a file; diagnostics go to `err`.
/// Returns 0 on success, 2 on usage errors, 1 on computation errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tmyag::cli
