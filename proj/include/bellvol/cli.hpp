#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "bellvol/state.hpp"

namespace bellvol::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitMismatch = 3;

/// Parses a state spec: "alpha=0.707", "gamma=1", "lambda=1.0,1.0",
/// optionally followed by "noise=0.2" as a separate token or after ';'.
FamilySpec parse_state_spec(const std::vector<std::string>& tokens);

/// Runs the command line (without the program name). Output files go to
/// the directory given by --output.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bellvol::cli
