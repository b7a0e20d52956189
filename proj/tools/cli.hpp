#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace typicality::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one subcommand (synth, train, relevance, score, report, eval).
/// `args` excludes the program name. Results go to files or `out`; errors go
/// to `err`. Returns 0 on success, 1 on a usage error and 2 on a data or
/// model error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace typicality::cli
