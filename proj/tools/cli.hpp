#pragma once

#include <iosfwd>

namespace tresca {

/// `tresca-shape <subcommand> [--config PATH] [--out DIR] [--beta X] [--mesh PATH]`
/// with subcommands solve, optimize, check-gradient, check-material, classify
/// and reproduce. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tresca
