#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace survscore::cli {

/// Runs one invocation of the tool. `args` excludes the program name.
/// Results go to `out` when --output is "-" (the default); diagnostics go to
/// `err` as a single line. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace survscore::cli
