#pragma once

#include <iosfwd>

namespace bracketing {

// bracketctl front end. Returns 0 on success, 1 on validation errors (bad input, unknown
// subcommand), 2 on internal invariant violations.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bracketing
