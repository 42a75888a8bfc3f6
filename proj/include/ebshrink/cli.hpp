#pragma once

#include <iosfwd>

namespace ebshrink {

// Dispatches the full command-line surface. Subcommand tables go to `out`
// only after the whole run succeeded; diagnostics go to `err`. Returns the
// process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace ebshrink
