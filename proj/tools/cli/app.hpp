#pragma once

#include <iosfwd>

namespace promptsent::cli {

// Parses argv and runs one subcommand. Returns the process exit code; error
// records go to `err` and to <out>/error.json.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace promptsent::cli
