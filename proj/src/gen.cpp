#include "kxstit/gen.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <set>

#include "json.hpp"

namespace kx {

namespace {

using Rng = std::mt19937_64;

std::size_t below(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }
bool chance(Rng& rng, double p) { return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p; }

[[noreturn]] void unsatisfiable(const std::string& msg) { throw Error("UnsatisfiableParams", msg); }

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

std::string agent_name(int i) {
  static const char* names[] = {"a", "b", "c", "d", "e", "f"};
  return i < 6 ? names[i] : "g" + std::to_string(i);
}

// Merges until the relation is invariant under succ and its inverse (which
// gives NoF on a permutation) and satisfies Unif-H.
void close_epistemic(UnionFind& uf, const KripkeModel& m, Rng& rng) {
  int n = m.size();
  std::vector<WorldId> pred(n);
  for (int w = 0; w < n; ++w) pred[m.succ[w]] = w;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int w = 0; w < n; ++w) {
      int r = uf.find(w);
      changed |= uf.unite(m.succ[w], m.succ[r]);
      changed |= uf.unite(pred[w], pred[r]);
    }
    for (int c = 0; c < m.box.class_count(); ++c) {
      const auto& cls = m.box.cell(c);
      std::vector<std::set<int>> linked(cls.size());
      std::set<int> all;
      for (std::size_t i = 0; i < cls.size(); ++i) {
        int r = uf.find(cls[i]);
        for (int u = 0; u < n; ++u)
          if (uf.find(u) == r) linked[i].insert(m.box.class_of(u));
        all.insert(linked[i].begin(), linked[i].end());
      }
      for (std::size_t i = 0; i < cls.size(); ++i)
        for (int target : all)
          if (!linked[i].count(target)) {
            const auto& t = m.box.cell(target);
            changed |= uf.unite(cls[i], t[below(rng, t.size())]);
          }
    }
  }
}

}  // namespace

KripkeModel random_model(const GenParams& p) {
  if (p.agent_count < 1) unsatisfiable("agent_count must be at least 1");
  if (p.n_bound < 1) unsatisfiable("n_bound must be at least 1");
  if (p.box_class_count < 1) unsatisfiable("box_class_count must be at least 1");
  if (p.max_class_size < 1) unsatisfiable("max_class_size must be at least 1");
  if (p.epistemic_coarseness < 0 || p.epistemic_coarseness > 1)
    unsatisfiable("epistemic_coarseness must lie in [0,1]");
  if (p.props.empty()) unsatisfiable("props must be non-empty");
  std::vector<int> cycles = p.cycle_structure.empty() ? std::vector<int>{p.box_class_count} : p.cycle_structure;
  if (std::any_of(cycles.begin(), cycles.end(), [](int c) { return c < 1; }) ||
      std::accumulate(cycles.begin(), cycles.end(), 0) != p.box_class_count)
    unsatisfiable("cycle_structure must be positive lengths summing to box_class_count");

  Rng rng(p.seed);
  KripkeModel m;
  for (int i = 0; i < p.agent_count; ++i) m.agents.push_back(agent_name(i));

  // box classes; classes on one cycle share their size so succ can be a bijection
  std::vector<std::vector<WorldId>> classes;
  std::vector<int> class_label;
  std::vector<std::pair<int, int>> cycle_of;  // class -> (first class of its cycle, length)
  for (int len : cycles) {
    int size = 1 + static_cast<int>(below(rng, static_cast<std::size_t>(p.max_class_size)));
    int first = static_cast<int>(classes.size());
    for (int k = 0; k < len; ++k) {
      std::vector<WorldId> cls;
      for (int i = 0; i < size; ++i) {
        cls.push_back(static_cast<WorldId>(m.worlds.size()));
        m.worlds.push_back("w" + std::to_string(m.worlds.size()));
        class_label.push_back(static_cast<int>(classes.size()));
      }
      classes.push_back(std::move(cls));
      cycle_of.emplace_back(first, len);
    }
  }
  int n = m.size();
  m.box = Partition::from_labels(class_label);

  m.succ.assign(n, kNoWorld);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    auto [first, len] = cycle_of[c];
    const auto& next = classes[first + (static_cast<int>(c) - first + 1) % len];
    std::vector<WorldId> image = next;
    std::shuffle(image.begin(), image.end(), rng);
    for (std::size_t i = 0; i < classes[c].size(); ++i) m.succ[classes[c][i]] = image[i];
  }

  for (int a = 0; a < p.agent_count; ++a) m.choice.push_back(m.box);
  m.choice_ags = m.box;

  for (int a = 0; a < p.agent_count; ++a) {
    UnionFind uf(n);
    for (int w = 0; w < n; ++w)
      if (n > 1 && chance(rng, p.epistemic_coarseness * 0.5)) uf.unite(w, static_cast<int>(below(rng, n)));
    close_epistemic(uf, m, rng);
    std::vector<int> label(n);
    for (int w = 0; w < n; ++w) label[w] = uf.find(w);
    m.epistemic.push_back(Partition::from_labels(label));
  }

  for (const auto& prop : p.props) {
    std::vector<bool> ext(n);
    for (int w = 0; w < n; ++w) ext[w] = chance(rng, 0.5);
    m.valuation[prop] = std::move(ext);
  }
  m.reindex();
  return m;
}

GenParams suite_params(std::uint64_t seed, int index) {
  Rng rng(seed * 1000003u + static_cast<std::uint64_t>(index));
  GenParams p;
  p.seed = rng();
  p.agent_count = 1 + static_cast<int>(below(rng, 3));
  p.n_bound = 1 + static_cast<int>(below(rng, 3));
  p.box_class_count = 1 + static_cast<int>(below(rng, 4));
  // split into one or two cycles
  if (p.box_class_count > 1 && chance(rng, 0.5)) {
    int first = 1 + static_cast<int>(below(rng, static_cast<std::size_t>(p.box_class_count - 1)));
    p.cycle_structure = {first, p.box_class_count - first};
  }
  p.epistemic_coarseness = static_cast<double>(below(rng, 5)) / 4.0;
  p.props = {"p", "q"};
  p.max_class_size = 1 + static_cast<int>(below(rng, 3));
  return p;
}

Formula random_formula(const FormulaParams& p) {
  if (p.props.empty()) throw Error("UnsatisfiableParams", "props must be non-empty");
  Rng rng(p.seed);
  std::function<Formula(int, int)> go = [&](int depth, int offset) -> Formula {
    if (depth <= 0 || below(rng, 5) == 0) return Formula::atom(p.props[below(rng, p.props.size())]);
    std::vector<int> ops = {0, 1, 2};  // not, and, box
    if (offset + 1 <= p.reach.forward_reach) ops.push_back(3);
    if (offset - 1 >= -p.reach.backward_reach) ops.push_back(4);
    if (!p.agents.empty()) ops.insert(ops.end(), {5, 6});
    if (p.allow_ags) ops.push_back(7);
    switch (ops[below(rng, ops.size())]) {
      case 0: return Formula::neg(go(depth - 1, offset));
      case 1: {
        auto l = go(depth - 1, offset);
        return Formula::conj(l, go(depth - 1, offset));
      }
      case 2: return Formula::box(go(depth - 1, offset));
      case 3: return Formula::next(go(depth - 1, offset + 1));
      case 4: return Formula::yesterday(go(depth - 1, offset - 1));
      case 5: {
        auto a = p.agents[below(rng, p.agents.size())];
        return Formula::stit(a, go(depth - 1, offset));
      }
      case 6: {
        auto a = p.agents[below(rng, p.agents.size())];
        return Formula::knows(a, go(depth - 1, offset));
      }
      default: return Formula::stit_ags(go(depth - 1, offset));
    }
  };
  return go(p.max_depth, 0);
}

GenParams load_gen_params(const std::string& document) {
  try {
    auto j = nlohmann::json::parse(document);
    GenParams p;
    p.seed = j.value("seed", std::uint64_t{0});
    p.agent_count = j.value("agent_count", 1);
    p.n_bound = j.value("n_bound", 1);
    p.box_class_count = j.value("box_class_count", 1);
    p.cycle_structure = j.value("cycle_structure", std::vector<int>{});
    p.epistemic_coarseness = j.value("epistemic_coarseness", 0.5);
    p.props = j.value("props", std::vector<std::string>{"p", "q"});
    p.max_class_size = j.value("max_class_size", 3);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error("SchemaError", std::string("malformed generator parameters: ") + e.what());
  }
}

std::string save_gen_params(const GenParams& p) {
  nlohmann::ordered_json j;
  j["seed"] = p.seed;
  j["agent_count"] = p.agent_count;
  j["n_bound"] = p.n_bound;
  j["box_class_count"] = p.box_class_count;
  j["cycle_structure"] = p.cycle_structure;
  j["epistemic_coarseness"] = p.epistemic_coarseness;
  j["props"] = p.props;
  j["max_class_size"] = p.max_class_size;
  return j.dump(2) + "\n";
}

}  // namespace kx
