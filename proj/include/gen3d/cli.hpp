#pragma once

#include <iosfwd>

namespace gen3d {

/// Command-line entry point. Returns 0 on success, 1 on input errors, 2 on internal errors.
/// Machine-readable results go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gen3d
