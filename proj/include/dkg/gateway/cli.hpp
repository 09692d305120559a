/**
 * @file cli.hpp
 * @brief The `dkg` command line.
 *
 * Exit codes: 0 success, 1 domain error (one JSON error line on stderr),
 * 2 usage error (message and usage text on stderr).
 */

#pragma once

#include <iosfwd>

namespace dkg::gateway {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dkg::gateway
