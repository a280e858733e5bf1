#include "kxstit/dot.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace kx {

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

// cells with members ordered by name, cells ordered by their first name
std::vector<std::vector<WorldId>> named_cells(const KripkeModel& m, const std::vector<std::vector<WorldId>>& cells) {
  auto by_name = [&](WorldId a, WorldId b) { return m.worlds[a] < m.worlds[b]; };
  std::vector<std::vector<WorldId>> out = cells;
  for (auto& c : out) std::sort(c.begin(), c.end(), by_name);
  std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) { return by_name(a.front(), b.front()); });
  return out;
}

}  // namespace

std::string to_dot(const KripkeModel& m) {
  std::ostringstream os;
  os << "digraph kxstit {\n  compound=true;\n  node [shape=ellipse];\n";
  std::vector<int> agents(m.agent_count());
  for (int a = 0; a < m.agent_count(); ++a) agents[a] = a;
  std::sort(agents.begin(), agents.end(), [&](int a, int b) { return m.agents[a] < m.agents[b]; });
  // per-agent cell numbers, counted in name order
  std::vector<std::map<int, int>> cell_no(m.agent_count());
  for (int a = 0; a < m.agent_count(); ++a) {
    auto cells = named_cells(m, m.choice[a].cells());
    for (std::size_t i = 0; i < cells.size(); ++i) cell_no[a][m.choice[a].class_of(cells[i].front())] = static_cast<int>(i);
  }
  auto box_cells = named_cells(m, m.box.cells());
  for (std::size_t b = 0; b < box_cells.size(); ++b) {
    os << "  subgraph cluster_box" << b << " {\n    label=\"box " << b << "\";\n    style=solid;\n";
    std::vector<std::vector<WorldId>> ags;
    for (const auto& cell : m.choice_ags.cells())
      if (m.box.same(cell.front(), box_cells[b].front())) ags.push_back(cell);
    ags = named_cells(m, ags);
    for (std::size_t c = 0; c < ags.size(); ++c) {
      std::string label;
      for (int a : agents)
        label += (label.empty() ? "" : " ") + m.agents[a] + ":" + std::to_string(cell_no[a][m.choice[a].class_of(ags[c].front())]);
      os << "    subgraph cluster_box" << b << "_ags" << c << " {\n      label=" << quote(label)
         << ";\n      style=dotted;\n";
      for (WorldId w : ags[c]) {
        std::string atoms;
        for (const auto& [prop, ext] : m.valuation)
          if (ext[w]) atoms += (atoms.empty() ? "" : ",") + prop;
        os << "      " << quote(m.worlds[w]) << " [label=" << quote(m.worlds[w] + (atoms.empty() ? "" : "\n" + atoms))
           << "];\n";
      }
      os << "    }\n";
    }
    os << "  }\n";
  }
  std::vector<WorldId> order(m.size());
  for (WorldId w = 0; w < m.size(); ++w) order[w] = w;
  std::sort(order.begin(), order.end(), [&](WorldId a, WorldId b) { return m.worlds[a] < m.worlds[b]; });
  for (WorldId w : order)
    if (m.succ[w] != kNoWorld) os << "  " << quote(m.worlds[w]) << " -> " << quote(m.worlds[m.succ[w]]) << ";\n";
  for (int a : agents)
    for (const auto& cell : named_cells(m, m.epistemic[a].cells()))
      for (std::size_t i = 1; i < cell.size(); ++i)
        os << "  " << quote(m.worlds[cell[i - 1]]) << " -> " << quote(m.worlds[cell[i]])
           << " [dir=none, style=dashed, constraint=false, label=" << quote("~" + m.agents[a]) << "];\n";
  os << "}\n";
  return os.str();
}

}  // namespace kx
