#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wirebend::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;       // bad arguments or malformed input
inline constexpr int kConstraint = 2;  // fabrication constraint violated / infeasible
inline constexpr int kIo = 3;          // file could not be read, parsed or written

// Runs one command line (args[0] is the program name). Results go to `out`
// or to files, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wirebend::cli
