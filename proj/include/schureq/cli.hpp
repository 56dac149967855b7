#pragma once

#include <ostream>

namespace schureq {

/// Command-line front end. Streams are injectable so tests can run commands
/// in-process. Exit status: 0 success, 2 usage/input errors, 3 construction
/// or convergence failures, 4 verification failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace schureq
