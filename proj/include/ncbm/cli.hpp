#pragma once

#include <iosfwd>

namespace ncbm {

/// Entry point of the `ncbm` command line tool. Subcommands:
///   simulate   sample paths of a process model to CSV
///   density    evaluate a named density on user points
///   verify     run a verification suite and emit a JSON report
/// Returns the process exit code; 0 iff the requested work succeeded
/// (for `verify`, iff the suite is green).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ncbm
