#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace birkhoff {

// Dispatch one command line (without the program name). Returns 0 on
// success, 1 on a domain error (reported to err), 2 on a usage error.
// All command output goes to out unless --out redirects it to a file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace birkhoff
