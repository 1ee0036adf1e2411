#pragma once

#include <ostream>

namespace cbandit {

/// Entry point of the `cbandit` tool. Exit codes: 0 success, 2 usage,
/// 3 invalid input (config, graph or model), 4 runtime failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cbandit
