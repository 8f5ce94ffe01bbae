#pragma once

#include <iosfwd>

namespace gpduo::cli {

// Runs one subcommand. Returns 0 on success, 1 on domain errors (a JSON
// {"error": {kind, message}} document goes to err) and 2 on usage errors.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gpduo::cli
