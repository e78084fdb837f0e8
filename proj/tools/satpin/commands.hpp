#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "satpin/error.hpp"

namespace satpin::cli {

// Process exit status for a failure category: usage 2, io 3, parse 4,
// precondition 5, numerical failures 6.
int exit_code(ErrorKind kind);

// Runs one invocation (arguments without the program name). Normal output
// goes to `out`; failures print a single "error: <category>: <message>" line
// to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace satpin::cli
