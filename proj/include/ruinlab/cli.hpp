#pragma once

#include <iosfwd>

namespace ruinlab::cli {

// Exit codes: 0 success, 1 runtime error or failed property, 2 invalid
// configuration or usage.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ruinlab::cli
