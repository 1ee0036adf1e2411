#pragma once

#include "cbandit/scm.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace cbandit {

// JSON model file:
//
//   {
//     "graph_file": "graphs/g.graph",          // or "graph": "<inline graph text>"
//     "latents": [{"between": ["A", "B"], "p": 0.5}],
//     "cpts": [{"node": "A", "parents": [], "latents": [0], "rows": [[0.3, 0.7], [0.6, 0.4]]}]
//   }
//
// Rows follow the Cpt layout. Relative graph paths resolve against
// `base_dir`. Throws ParseError / Error(ModelInvalid).
Scm parse_model(std::string_view json_text, const std::filesystem::path& base_dir = {});
Scm read_model_file(const std::filesystem::path& path);

/// JSON with the graph inlined.
std::string format_model(const Scm& scm);

}  // namespace cbandit
