#pragma once

// Command-line front end: laplace, price, validate, experiment.
//
// Exit codes: 0 success, 1 a validation check failed, 2 usage or regime
// error, 3 numerical failure.  Data goes to stdout (or --out), diagnostics
// and timing to stderr.

#include <iosfwd>
#include <string>
#include <vector>

namespace besq::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace besq::cli
