#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bsedepth::cli {

/// Runs one command line (args exclude the program name). Returns the exit
/// status; diagnostics go to `err` as a single line prefixed "error:".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bsedepth::cli
