#pragma once

#include "cbandit/admg.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace cbandit {

// Line-oriented graph text:
//
//   nodes: X1 X2 X3:3 Y        # optional ":k" domain size, default 2
//   directed: X1->Y, X2->Y
//   bidirected: X1<->X2
//   reward: Y
//   intervenable: X1 X2        # optional, default all but the reward
//
// Keys may repeat; lists accumulate. `#` starts a comment.
Admg parse_graph(std::string_view text);
Admg read_graph_file(const std::filesystem::path& path);

/// Canonical text with names in alphabetical order.
std::string format_graph(const Admg& g);

/// "{A, B}" using node names.
std::string format_node_set(const Admg& g, const NodeSet& set);

}  // namespace cbandit
