#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace creditnet::cli {

inline constexpr char const* version = "0.1.0";

/// Runs one command line; `args[0]` is the program name. Reports and a run
/// manifest go to the `--out` directory, diagnostics to `err`.
/// Returns 0 on success, 1 on a domain error, 2 on a usage error.
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

}  // namespace creditnet::cli
