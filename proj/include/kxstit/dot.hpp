#pragma once

#include <string>

#include "kxstit/model.hpp"

namespace kx {

// Graphviz digraph: one cluster per box class, nested clusters for Ags-cells
// labelled with each agent's cell, solid succ edges and dashed undirected
// edges chaining the worlds of each epistemic class. Everything is ordered by
// world name, so the output does not depend on world order in the file.
std::string to_dot(const KripkeModel& m);

}  // namespace kx
