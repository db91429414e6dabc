#pragma once

#include <iosfwd>

namespace wimwc::cli {

/// Exit codes: 0 success, 1 property violation, 2 invalid input, 3 numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wimwc::cli
