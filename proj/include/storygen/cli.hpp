#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace storygen::cli {

// Dispatches a subcommand. args[0] is the program name. Returns 0 on success,
// 1 on a domain error and 2 on a usage error; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace storygen::cli
