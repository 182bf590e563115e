#pragma once

#include <iosfwd>

namespace jnlab {

/// Runs one command line. Exit status: 0 all checks pass, 1 some check fails, 2 usage or input error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jnlab
