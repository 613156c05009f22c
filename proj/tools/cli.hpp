#pragma once

#include <iosfwd>

namespace cslab::cli {

/// Entry point of the `cslab` tool with injectable streams.
/// Exit codes: 0 success, 1 computation or I/O failure, 2 bad flags.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cslab::cli
