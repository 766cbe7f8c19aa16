#pragma once

// Command-line front end. `run` never calls exit and writes only to the
// given streams, so tests can drive it in-process.

#include <iosfwd>
#include <string>
#include <vector>

namespace blscale::cli {

inline constexpr int kExitOk = 0;          // feasible / finite / inside / converged
inline constexpr int kExitInputError = 1;  // unreadable or malformed input, bad flags
inline constexpr int kExitNegative = 3;    // infeasible / infinite / outside / zero capacity
inline constexpr int kExitInconclusive = 4;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace blscale::cli
