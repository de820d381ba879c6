#ifndef PHBURGERS_TOOLS_CLI_HPP
#define PHBURGERS_TOOLS_CLI_HPP

#include <iosfwd>

namespace phb::cli {

enum ExitCode : int {
    ok = 0,
    usage_error = 1,
    verification_failure = 2,
    dt_underflow = 3,
};

/*!
 * \brief Entry point of the phburgers tool.
 *
 * Subcommands: run, sweep, verify, oracle. Data goes to files (oracle
 * values to \p out), everything else to \p err.
 */
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace phb::cli

#endif
