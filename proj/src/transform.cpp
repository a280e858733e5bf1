#include "kxstit/transform.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "json.hpp"
#include "kxstit/checker.hpp"

namespace kx {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  Partition partition() {
    std::vector<int> label(parent.size());
    for (std::size_t i = 0; i < parent.size(); ++i) label[i] = find(static_cast<int>(i));
    return Partition::from_labels(label);
  }
};

Partition partition_by(const std::vector<std::vector<int>>& keys) {
  std::map<std::vector<int>, int> id;
  std::vector<int> label(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    int next = static_cast<int>(id.size());
    label[i] = id.emplace(keys[i], next).first->second;
  }
  return Partition::from_labels(label);
}

std::string join_names(const KripkeModel& m, const std::vector<WorldId>& seq) {
  std::string out;
  for (WorldId w : seq) out += (out.empty() ? "" : ".") + m.worlds[w];
  return out;
}

// Keys of the unraveled relations: flag-1 sequences also compare the Ags-cells
// of every earlier element, flag-0 sequences only their last element.
std::vector<int> seq_key(const KripkeModel& m, const std::vector<WorldId>& s, int flag, int last_class) {
  std::vector<int> k{flag, static_cast<int>(s.size())};
  if (flag == 1)
    for (std::size_t j = 0; j + 1 < s.size(); ++j) k.push_back(m.choice_ags.class_of(s[j]));
  k.push_back(last_class);
  return k;
}

struct SeqModel {
  std::vector<std::vector<WorldId>> seqs;
  std::vector<int> flags;
};

int level_of(const std::vector<WorldId>& s, int flag) {
  int m = static_cast<int>(s.size()) - 1;
  return flag == 1 ? m : -m;
}

// Builds the window structure over the given sequences; succ links are
// resolved by lookup and left undefined when the target was dropped.
Unraveled build_window(const KripkeModel& m, const SeqModel& sm, int horizon) {
  Unraveled u;
  int n = static_cast<int>(sm.seqs.size());
  std::map<std::pair<std::vector<WorldId>, int>, int> index;
  for (int i = 0; i < n; ++i) index[{sm.seqs[i], sm.flags[i]}] = i;
  KripkeModel& w = u.window.model;
  w.agents = m.agents;
  std::vector<std::vector<int>> box(n), ags(n);
  std::vector<std::vector<std::vector<int>>> choice(m.agent_count(), std::vector<std::vector<int>>(n)),
      ep(m.agent_count(), std::vector<std::vector<int>>(n));
  w.succ.assign(n, kNoWorld);
  for (int i = 0; i < n; ++i) {
    const auto& s = sm.seqs[i];
    int flag = sm.flags[i];
    WorldId last = s.back();
    w.worlds.push_back(join_names(m, s) + (flag == 1 ? "#1" : "#0"));
    box[i] = seq_key(m, s, flag, m.box.class_of(last));
    ags[i] = seq_key(m, s, flag, m.choice_ags.class_of(last));
    for (int a = 0; a < m.agent_count(); ++a) {
      choice[a][i] = seq_key(m, s, flag, m.choice[a].class_of(last));
      ep[a][i] = {m.epistemic[a].class_of(last)};
    }
    std::pair<std::vector<WorldId>, int> next;
    if (flag == 1) {
      next = {s, 1};
      next.first.push_back(m.succ[last]);
    } else if (s.size() > 2) {
      next = {std::vector<WorldId>(s.begin(), s.end() - 1), 0};
    } else {
      next = {{s.front()}, 1};
    }
    auto it = index.find(next);
    if (it != index.end()) w.succ[i] = it->second;
    u.projection.push_back(last);
    u.window.level.push_back(level_of(s, flag));
    u.window.interior.push_back(std::abs(level_of(s, flag)) < horizon);
  }
  w.box = partition_by(box);
  w.choice_ags = partition_by(ags);
  for (int a = 0; a < m.agent_count(); ++a) {
    w.choice.push_back(partition_by(choice[a]));
    w.epistemic.push_back(partition_by(ep[a]));
  }
  for (const auto& [prop, ext] : m.valuation) {
    std::vector<bool> v(n);
    for (int i = 0; i < n; ++i) v[i] = ext[u.projection[i]];
    w.valuation[prop] = std::move(v);
  }
  w.reindex();
  u.window.horizon = horizon;
  u.sequence = sm.seqs;
  u.flag = sm.flags;
  return u;
}

}  // namespace

Unraveled unravel(const KripkeModel& m, WorldId root, int horizon) {
  if (horizon < 1)
    throw Error("HorizonTooSmall", "unraveling needs a horizon of at least 1", {{"horizon", std::to_string(horizon)}});
  if (root < 0 || root >= m.size()) throw Error("UnknownWorld", "root is not a world of the model");
  auto rep = validate_frame(m, AdditivityMode::SuperAdditive, tight_bound(m));
  for (const char* c : {"EQ", "SET", "Additivity"})
    if (!rep.get(c).pass)
      throw Error("InvalidModel", std::string("unraveling needs ") + c + ": " + rep.get(c).explanation,
                  {{"condition", c}});

  SeqModel all;
  for (WorldId w = 0; w < m.size(); ++w) {
    std::vector<WorldId> s{w};
    all.seqs.push_back(s);
    all.flags.push_back(1);
    for (int k = 1; k <= horizon; ++k) {
      s.push_back(m.succ[s.back()]);
      all.seqs.push_back(s);
      all.flags.push_back(1);
    }
  }
  std::function<void(std::vector<WorldId>&)> down = [&](std::vector<WorldId>& s) {
    if (static_cast<int>(s.size()) > horizon) return;
    for (WorldId p : m.preds[s.back()]) {
      s.push_back(p);
      all.seqs.push_back(s);
      all.flags.push_back(0);
      down(s);
      s.pop_back();
    }
  };
  for (WorldId w = 0; w < m.size(); ++w) {
    std::vector<WorldId> s{w};
    down(s);
  }

  // keep the part connected to <root,1>
  Unraveled full = build_window(m, all, horizon);
  const KripkeModel& fw = full.window.model;
  UnionFind uf(fw.size());
  auto join_cells = [&](const Partition& p) {
    for (const auto& cell : p.cells())
      for (WorldId x : cell) uf.unite(cell.front(), x);
  };
  join_cells(fw.box);
  join_cells(fw.choice_ags);
  for (int a = 0; a < fw.agent_count(); ++a) {
    join_cells(fw.choice[a]);
    join_cells(fw.epistemic[a]);
  }
  for (WorldId x = 0; x < fw.size(); ++x)
    if (fw.succ[x] != kNoWorld) uf.unite(x, fw.succ[x]);
  int root_id = -1;
  for (WorldId x = 0; x < fw.size(); ++x)
    if (all.flags[x] == 1 && all.seqs[x].size() == 1 && all.seqs[x][0] == root) root_id = x;
  int comp = uf.find(root_id);

  std::vector<int> keep;
  for (WorldId x = 0; x < fw.size(); ++x)
    if (uf.find(x) == comp) keep.push_back(x);
  std::sort(keep.begin(), keep.end(), [&](int a, int b) {
    int la = full.window.level[a], lb = full.window.level[b];
    return la != lb ? la < lb : all.seqs[a] < all.seqs[b];
  });
  SeqModel kept;
  for (int x : keep) {
    kept.seqs.push_back(all.seqs[x]);
    kept.flags.push_back(all.flags[x]);
  }
  return build_window(m, kept, horizon);
}

Unraveled unravel(const KripkeModel& m, const std::string& root, int horizon) {
  return unravel(m, m.world(root), horizon);
}

// ---- bounded morphisms

bool MorphismReport::ok() const {
  return surjective && atoms && std::all_of(relations.begin(), relations.end(), [](const RelationVerdict& r) {
           return r.forth && r.back;
         });
}

std::string MorphismReport::to_json(const KripkeModel& source, const KripkeModel& target) const {
  nlohmann::ordered_json j;
  j["ok"] = ok();
  j["checked"] = checked;
  j["surjective"] = surjective;
  j["missed"] = nlohmann::json::array();
  for (WorldId t : missed) j["missed"].push_back(target.worlds[t]);
  j["atoms"] = atoms;
  j["relations"] = nlohmann::json::array();
  for (const auto& r : relations) j["relations"].push_back({{"relation", r.relation}, {"forth", r.forth}, {"back", r.back}});
  j["failures"] = nlohmann::json::array();
  for (const auto& f : failures) {
    nlohmann::ordered_json e;
    e["relation"] = f.relation;
    e["kind"] = f.kind;
    e["source"] = source.worlds[f.source];
    if (f.other != kNoWorld) e["other"] = f.kind == "back" ? target.worlds[f.other] : source.worlds[f.other];
    e["detail"] = f.detail;
    j["failures"].push_back(e);
  }
  return j.dump(2) + "\n";
}

MorphismReport check_bounded_morphism(const std::vector<WorldId>& f, const KripkeModel& s,
                                      const std::vector<bool>& checked, const KripkeModel& t) {
  if (static_cast<int>(f.size()) != s.size() || static_cast<int>(checked.size()) != s.size())
    throw Error("PartialMap", "map size does not match the source model");
  for (WorldId u = 0; u < s.size(); ++u)
    if (checked[u] && (f[u] < 0 || f[u] >= t.size()))
      throw Error("PartialMap", "map is undefined on " + s.worlds[u], {{"world", s.worlds[u]}});

  MorphismReport r;
  const std::size_t cap = 1000;
  auto fail = [&](RelationVerdict* v, const std::string& kind, WorldId u, WorldId other, std::string detail) {
    if (v) (kind == "forth" ? v->forth : v->back) = false;
    if (r.failures.size() < cap)
      r.failures.push_back({v ? v->relation : "atoms", kind, u, other, std::move(detail)});
  };
  std::vector<WorldId> todo;
  for (WorldId u = 0; u < s.size(); ++u)
    if (checked[u]) todo.push_back(u);
  r.checked = static_cast<int>(todo.size());

  std::set<std::string> props;
  for (const auto& kv : s.valuation) props.insert(kv.first);
  for (const auto& kv : t.valuation) props.insert(kv.first);
  for (WorldId u : todo)
    for (const auto& p : props)
      if (s.holds(p, u) != t.holds(p, f[u])) {
        r.atoms = false;
        fail(nullptr, "atoms", u, kNoWorld, "valuation of " + p + " differs");
      }

  auto equivalence = [&](const std::string& name, const Partition& sp, const Partition& tp) {
    RelationVerdict v{name};
    for (WorldId u : todo) {
      std::set<WorldId> image;
      for (WorldId x : sp.cell_of(u)) {
        if (f[x] < 0) continue;
        image.insert(f[x]);
        if (!tp.same(f[u], f[x])) fail(&v, "forth", u, x, "image of a related world is unrelated");
      }
      for (WorldId y : tp.cell_of(f[u]))
        if (!image.count(y)) fail(&v, "back", u, y, "target alternative has no related preimage");
    }
    r.relations.push_back(v);
  };

  equivalence("box", s.box, t.box);
  {
    RelationVerdict v{"X"};
    for (WorldId u : todo) {
      WorldId su = s.succ[u], tu = t.succ[f[u]];
      if (su != kNoWorld && f[su] >= 0 && tu != f[su]) fail(&v, "forth", u, su, "successor maps off the target successor");
      if (tu != kNoWorld && (su == kNoWorld || f[su] != tu)) fail(&v, "back", u, tu, "target successor has no preimage successor");
    }
    r.relations.push_back(v);
  }
  {
    RelationVerdict v{"Y"};
    for (WorldId u : todo) {
      std::set<WorldId> image;
      for (WorldId p : s.preds[u]) {
        if (f[p] < 0) continue;
        image.insert(f[p]);
        if (t.succ[f[p]] != f[u]) fail(&v, "forth", u, p, "predecessor maps off the target predecessors");
      }
      for (WorldId y : t.preds[f[u]])
        if (!image.count(y)) fail(&v, "back", u, y, "target predecessor has no preimage predecessor");
    }
    r.relations.push_back(v);
  }
  for (int a = 0; a < s.agent_count(); ++a)
    equivalence("choice:" + s.agents[a], s.choice[a], t.choice[t.agent(s.agents[a])]);
  equivalence("choice:Ags", s.choice_ags, t.choice_ags);
  for (int a = 0; a < s.agent_count(); ++a)
    equivalence("K:" + s.agents[a], s.epistemic[a], t.epistemic[t.agent(s.agents[a])]);

  // surjectivity onto the part of the target connected to the checked image
  std::vector<bool> in_image(t.size()), seen(t.size());
  for (WorldId u = 0; u < s.size(); ++u)
    if (f[u] >= 0 && f[u] < t.size()) in_image[f[u]] = true;
  std::vector<WorldId> stack;
  for (WorldId u : todo)
    if (!seen[f[u]]) {
      seen[f[u]] = true;
      stack.push_back(f[u]);
    }
  auto push = [&](WorldId y) {
    if (y != kNoWorld && !seen[y]) {
      seen[y] = true;
      stack.push_back(y);
    }
  };
  while (!stack.empty()) {
    WorldId x = stack.back();
    stack.pop_back();
    for (WorldId y : t.box.cell_of(x)) push(y);
    for (WorldId y : t.choice_ags.cell_of(x)) push(y);
    for (int a = 0; a < t.agent_count(); ++a) {
      for (WorldId y : t.choice[a].cell_of(x)) push(y);
      for (WorldId y : t.epistemic[a].cell_of(x)) push(y);
    }
    push(t.succ[x]);
    for (WorldId y : t.preds[x]) push(y);
  }
  for (WorldId y = 0; y < t.size(); ++y)
    if (seen[y] && !in_image[y]) {
      r.surjective = false;
      r.missed.push_back(y);
    }
  return r;
}

MorphismReport check_bounded_morphism(const std::vector<WorldId>& f, const WindowModel& source,
                                      const KripkeModel& target, bool interior_only) {
  std::vector<bool> checked = interior_only ? source.interior : std::vector<bool>(source.model.size(), true);
  return check_bounded_morphism(f, source.model, checked, target);
}

MorphismReport check_bounded_morphism(const std::vector<WorldId>& f, const KripkeModel& source,
                                      const KripkeModel& target) {
  return check_bounded_morphism(f, source, std::vector<bool>(source.size(), true), target);
}

// ---- three-valued evaluation

std::vector<Truth> extension3(const WindowModel& win, const Formula& f) {
  const KripkeModel& m = win.model;
  Formula g = normalize(f);
  int n = m.size();
  std::map<std::string, std::vector<Truth>> table;
  auto by_cells = [&](const Partition& p, const std::vector<Truth>& sub) {
    std::vector<Truth> out(n);
    for (const auto& cell : p.cells()) {
      Truth v = Truth::True;
      for (WorldId u : cell) {
        if (sub[u] == Truth::False) {
          v = Truth::False;
          break;
        }
        if (sub[u] == Truth::Unknown) v = Truth::Unknown;
      }
      for (WorldId u : cell) out[u] = v;
    }
    return out;
  };
  std::optional<Partition> ck;
  for (const Formula& s : subformulas(g)) {
    std::vector<Truth> ext(n);
    auto sub = [&](std::size_t i) -> const std::vector<Truth>& { return table.at(s.child(i).key()); };
    switch (s.op()) {
      case Op::Atom:
        for (int w = 0; w < n; ++w) ext[w] = m.holds(s.name(), w) ? Truth::True : Truth::False;
        break;
      case Op::Not:
        for (int w = 0; w < n; ++w) {
          Truth x = sub(0)[w];
          ext[w] = x == Truth::Unknown ? x : (x == Truth::True ? Truth::False : Truth::True);
        }
        break;
      case Op::And:
        for (int w = 0; w < n; ++w) {
          Truth l = sub(0)[w], r = sub(1)[w];
          ext[w] = (l == Truth::False || r == Truth::False) ? Truth::False
                   : (l == Truth::True && r == Truth::True) ? Truth::True
                                                            : Truth::Unknown;
        }
        break;
      case Op::Box: ext = by_cells(m.box, sub(0)); break;
      case Op::Next:
        for (int w = 0; w < n; ++w) ext[w] = m.succ[w] == kNoWorld ? Truth::Unknown : sub(0)[m.succ[w]];
        break;
      case Op::Yesterday:
        for (int w = 0; w < n; ++w) {
          if (!win.interior[w]) {
            ext[w] = Truth::Unknown;
            continue;
          }
          Truth v = Truth::True;
          for (WorldId p : m.preds[w]) {
            if (sub(0)[p] == Truth::False) {
              v = Truth::False;
              break;
            }
            if (sub(0)[p] == Truth::Unknown) v = Truth::Unknown;
          }
          ext[w] = v;
        }
        break;
      case Op::Stit: ext = by_cells(m.choice[m.agent(s.name())], sub(0)); break;
      case Op::StitAgs: ext = by_cells(m.choice_ags, sub(0)); break;
      case Op::Knows: ext = by_cells(m.epistemic[m.agent(s.name())], sub(0)); break;
      case Op::Common:
        if (!ck) ck = common_knowledge_classes(m);
        ext = by_cells(*ck, sub(0));
        break;
      default: throw Error("Internal", "non-primitive node after normalize");
    }
    table[s.key()] = std::move(ext);
  }
  return table.at(g.key());
}

WindowModel as_window(const KripkeModel& m) {
  WindowModel w;
  w.model = m;
  w.horizon = 1 << 20;
  w.interior.assign(m.size(), true);
  w.level.assign(m.size(), 0);
  return w;
}

std::string PreservationReport::to_json(const KripkeModel& source) const {
  nlohmann::ordered_json j;
  j["ok"] = ok();
  j["checked"] = checked;
  j["undetermined"] = undetermined;
  j["skipped"] = nlohmann::json::array();
  for (const auto& [formula, w] : skipped)
    j["skipped"].push_back({{"error", "DepthExceedsWindow"}, {"formula", formula}, {"world", source.worlds[w]}});
  j["mismatches"] = nlohmann::json::array();
  for (const auto& mm : mismatches)
    j["mismatches"].push_back({{"world", source.worlds[mm.world]},
                               {"formula", mm.formula},
                               {"source", mm.source_value},
                               {"target", mm.target_value}});
  return j.dump(2) + "\n";
}

PreservationReport truth_preservation(const WindowModel& source, const WindowModel& target,
                                      const std::vector<WorldId>& f, const std::vector<Formula>& formulas) {
  if (static_cast<int>(f.size()) != source.model.size())
    throw Error("PartialMap", "map size does not match the source model");
  PreservationReport r;
  for (const auto& phi : formulas) {
    auto prof = depth_profile(phi);
    int reach = std::max(prof.forward_reach, prof.backward_reach);
    auto es = extension3(source, phi);
    auto et = extension3(target, phi);
    std::string text = print(phi);
    for (WorldId u = 0; u < source.model.size(); ++u) {
      if (!source.interior[u]) continue;
      if (reach > source.horizon - std::abs(source.level[u])) {
        r.skipped.emplace_back(text, u);
        continue;
      }
      if (f[u] < 0 || f[u] >= target.model.size())
        throw Error("PartialMap", "map is undefined on " + source.model.worlds[u]);
      Truth a = es[u], b = et[f[u]];
      if (a == Truth::Unknown || b == Truth::Unknown) {
        ++r.undetermined;
        continue;
      }
      ++r.checked;
      if (a != b) r.mismatches.push_back({u, text, a == Truth::True, b == Truth::True});
    }
  }
  return r;
}

PreservationReport truth_preservation(const WindowModel& source, const KripkeModel& target,
                                      const std::vector<WorldId>& f, const std::vector<Formula>& formulas) {
  return truth_preservation(source, as_window(target), f, formulas);
}

// ---- choice profiles

int ChoiceProfileTable::profile_of(WorldId w) const {
  for (std::size_t i = 0; i < profiles.size(); ++i)
    if (std::binary_search(profiles[i].members.begin(), profiles[i].members.end(), w)) return static_cast<int>(i);
  return -1;
}

ChoiceProfileTable choice_profiles(const KripkeModel& m, int box_class, std::optional<int> n) {
  ChoiceProfileTable t;
  t.box_class = box_class;
  t.n = n.value_or(tight_bound(m));
  if (t.n < 1) throw Error("InvalidBound", "n must be positive", {{"n", std::to_string(t.n)}});
  std::map<std::vector<int>, int> index;
  for (WorldId w : m.box.cell(box_class)) {
    std::vector<int> key;
    for (int a = 0; a < m.agent_count(); ++a) key.push_back(m.choice[a].class_of(w));
    auto [it, fresh] = index.emplace(key, static_cast<int>(t.profiles.size()));
    if (fresh) t.profiles.push_back({key, {}, {}, {}});
    t.profiles[it->second].members.push_back(w);
  }
  for (auto& p : t.profiles) {
    for (WorldId w : p.members) {
      int c = m.choice_ags.class_of(w);
      if (std::find(p.ags_cells.begin(), p.ags_cells.end(), c) != p.ags_cells.end()) continue;
      const auto& cell = m.choice_ags.cell(c);
      bool inside = std::all_of(cell.begin(), cell.end(), [&](WorldId x) {
        return std::binary_search(p.members.begin(), p.members.end(), x);
      });
      if (inside) p.ags_cells.push_back(c);
    }
    if (static_cast<int>(p.ags_cells.size()) > t.n)
      throw Error("InvalidBound", "a choice profile holds more than n Ags-cells",
                  {{"n", std::to_string(t.n)}, {"cells", std::to_string(p.ags_cells.size())}});
    p.enumeration = p.ags_cells;
    if (!p.enumeration.empty())
      while (static_cast<int>(p.enumeration.size()) < t.n) p.enumeration.push_back(p.enumeration.back());
  }
  return t;
}

// ---- matrix construction

Actualized actualize(const WindowModel& src, std::optional<int> n_opt, std::size_t max_worlds) {
  const KripkeModel& m = src.model;
  if (src.horizon < 1) throw Error("WindowTooSmall", "the source window has no interior");
  int n = n_opt.value_or(tight_bound(m));
  if (n < 1) throw Error("InvalidBound", "n must be positive", {{"n", std::to_string(n)}});
  int k = m.agent_count();
  int N = m.size();

  for (WorldId w = 0; w < N; ++w) {
    if (m.succ[w] == w)
      throw Error("SourceNotIrreflexive", m.worlds[w] + " is its own successor", {{"world", m.worlds[w]}});
    if (m.preds[w].size() > 1)
      throw Error("InvalidModel", "histories branch backwards at " + m.worlds[w], {{"world", m.worlds[w]}});
  }
  std::vector<std::vector<WorldId>> chains;
  std::vector<int> chain_of(N, -1), pos_of(N, -1);
  for (WorldId w = 0; w < N; ++w) {
    if (!m.preds[w].empty()) continue;
    std::vector<WorldId> c;
    for (WorldId x = w; x != kNoWorld; x = m.succ[x]) {
      chain_of[x] = static_cast<int>(chains.size());
      pos_of[x] = static_cast<int>(c.size());
      c.push_back(x);
    }
    chains.push_back(std::move(c));
  }
  for (WorldId w = 0; w < N; ++w)
    if (chain_of[w] < 0)
      throw Error("SourceNotIrreflexive", "the history through " + m.worlds[w] + " is a cycle",
                  {{"world", m.worlds[w]}});

  // index vectors and the positions of the padded enumeration each world fills
  std::size_t vec_count = 1;
  for (int a = 0; a < k; ++a) {
    vec_count *= static_cast<std::size_t>(n);
    if (vec_count > max_worlds) throw Error("MatrixTooLarge", "too many index vectors");
  }
  std::vector<std::vector<int>> vecs(vec_count, std::vector<int>(k));
  std::vector<int> vec_sum(vec_count);
  for (std::size_t i = 0; i < vec_count; ++i) {
    std::size_t x = i;
    for (int a = 0; a < k; ++a) {
      vecs[i][a] = static_cast<int>(x % n);
      x /= n;
      vec_sum[i] += vecs[i][a];
    }
  }
  std::vector<ChoiceProfileTable> tables;
  for (int c = 0; c < m.box.class_count(); ++c) tables.push_back(choice_profiles(m, c, n));
  std::vector<std::vector<int>> allowed(N);
  for (WorldId v = 0; v < N; ++v) {
    const auto& table = tables[m.box.class_of(v)];
    const auto& enumeration = table.profiles[table.profile_of(v)].enumeration;
    int own = m.choice_ags.class_of(v);
    for (std::size_t i = 0; i < vec_count; ++i)
      if (!enumeration.empty() && enumeration[vec_sum[i] % n] == own) allowed[v].push_back(static_cast<int>(i));
    if (allowed[v].empty())
      throw Error("InvalidModel", "the Ags-cell of " + m.worlds[v] + " lies in no choice profile",
                  {{"world", m.worlds[v]}});
  }

  // index functions per history
  std::vector<std::vector<std::vector<int>>> fs(chains.size());
  std::size_t total = 0;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    const auto& ch = chains[c];
    std::size_t count = 1;
    for (WorldId v : ch) {
      count *= allowed[v].size();
      if (count * ch.size() + total > max_worlds)
        throw Error("MatrixTooLarge", "the matrix construction exceeds " + std::to_string(max_worlds) + " worlds");
    }
    std::vector<std::size_t> odo(ch.size());
    for (std::size_t r = 0; r < count; ++r) {
      std::vector<int> f(ch.size());
      for (std::size_t i = 0; i < ch.size(); ++i) f[i] = allowed[ch[i]][odo[i]];
      bool constant = true;
      for (std::size_t i = 0; i < ch.size() && constant; ++i)
        for (std::size_t j = i + 1; j < ch.size(); ++j)
          if (m.choice_ags.same(ch[i], ch[j]) && f[i] != f[j]) constant = false;
      if (constant) fs[c].push_back(std::move(f));
      for (std::size_t i = 0; i < ch.size(); ++i) {
        if (++odo[i] < allowed[ch[i]].size()) break;
        odo[i] = 0;
      }
    }
    total += fs[c].size() * ch.size();
  }

  Actualized out;
  out.n = n;
  std::vector<int> w_chain, w_f, w_pos;
  std::vector<WorldId> base;
  std::vector<std::size_t> offset(chains.size());
  for (std::size_t c = 0; c < chains.size(); ++c) {
    offset[c] = base.size();
    for (std::size_t fi = 0; fi < fs[c].size(); ++fi)
      for (std::size_t p = 0; p < chains[c].size(); ++p) {
        w_chain.push_back(static_cast<int>(c));
        w_f.push_back(static_cast<int>(fi));
        w_pos.push_back(static_cast<int>(p));
        base.push_back(chains[c][p]);
      }
  }
  int M = static_cast<int>(base.size());
  auto fval = [&](int x, std::size_t p) { return fs[w_chain[x]][w_f[x]][p]; };
  auto own = [&](int x) { return fval(x, w_pos[x]); };
  // for all earlier v, v' with v R_Ags v' the index vectors agree
  auto past_ok = [&](int x, int y) {
    const auto& cx = chains[w_chain[x]];
    const auto& cy = chains[w_chain[y]];
    for (int i = 0; i < w_pos[x]; ++i)
      for (int j = 0; j < w_pos[y]; ++j)
        if (m.choice_ags.same(cx[i], cy[j]) && fval(x, i) != fval(y, j)) return false;
    return true;
  };
  auto closure = [&](const std::function<std::vector<int>(int)>& group, const std::function<bool(int, int)>& rel) {
    std::map<std::vector<int>, std::vector<int>> groups;
    for (int x = 0; x < M; ++x) groups[group(x)].push_back(x);
    UnionFind uf(M);
    for (const auto& [key, members] : groups)
      for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t j = i + 1; j < members.size(); ++j)
          if (uf.find(members[i]) != uf.find(members[j]) && rel(members[i], members[j]))
            uf.unite(members[i], members[j]);
    return uf.partition();
  };

  KripkeModel& mm = out.window.model;
  mm.agents = m.agents;
  for (int x = 0; x < M; ++x) {
    std::string name = m.worlds[base[x]] + "@";
    const auto& ch = chains[w_chain[x]];
    for (std::size_t p = 0; p < ch.size(); ++p) {
      if (p) name += ".";
      for (int a = 0; a < k; ++a) name += (n > 10 && a ? "," : "") + std::to_string(vecs[fval(x, p)][a]);
    }
    mm.worlds.push_back(name);
  }
  mm.succ.assign(M, kNoWorld);
  for (int x = 0; x < M; ++x)
    if (w_pos[x] + 1 < static_cast<int>(chains[w_chain[x]].size())) mm.succ[x] = x + 1;
  mm.box = closure([&](int x) { return std::vector<int>{m.box.class_of(base[x])}; }, past_ok);
  for (int a = 0; a < k; ++a) {
    mm.choice.push_back(closure(
        [&](int x) { return std::vector<int>{m.choice[a].class_of(base[x]), vecs[own(x)][a]}; }, past_ok));
    std::vector<int> label(M);
    for (int x = 0; x < M; ++x) label[x] = m.epistemic[a].class_of(base[x]);
    mm.epistemic.push_back(Partition::from_labels(label));
  }
  mm.choice_ags = closure(
      [&](int x) {
        std::vector<int> key{m.box.class_of(base[x]), own(x)};
        for (int a = 0; a < k; ++a) key.push_back(m.choice[a].class_of(base[x]));
        return key;
      },
      past_ok);
  for (const auto& [prop, ext] : m.valuation) {
    std::vector<bool> v(M);
    for (int x = 0; x < M; ++x) v[x] = ext[base[x]];
    mm.valuation[prop] = std::move(v);
  }
  mm.reindex();
  out.window.horizon = src.horizon;
  for (int x = 0; x < M; ++x) {
    out.window.interior.push_back(src.interior[base[x]]);
    out.window.level.push_back(src.level[base[x]]);
    out.history.push_back(chains[w_chain[x]]);
    std::vector<std::vector<int>> idx;
    for (std::size_t p = 0; p < chains[w_chain[x]].size(); ++p) idx.push_back(vecs[fval(x, p)]);
    out.index_fn.push_back(std::move(idx));
    out.position.push_back(w_pos[x]);
  }
  out.projection = base;
  return out;
}

WindowModel super_additive_example() {
  return load_window(R"({
  "format_version": 1,
  "agents": ["a", "b"],
  "worlds": ["g1", "g2", "e1", "e2", "x1", "x2", "u1", "u2", "z1", "z2"],
  "r_box": [["g1", "g2"], ["e1", "e2"], ["x1", "x2"], ["u1"], ["u2"], ["z1"], ["z2"]],
  "succ": {"g1": "e1", "g2": "e2", "e1": "x1", "e2": "x2", "x1": "u1", "x2": "u2", "u1": "z1", "u2": "z2"},
  "choice": {
    "a": [["g1", "g2"], ["e1", "e2"], ["x1", "x2"], ["u1"], ["u2"], ["z1"], ["z2"]],
    "b": [["g1", "g2"], ["e1", "e2"], ["x1", "x2"], ["u1"], ["u2"], ["z1"], ["z2"]]
  },
  "choice_ags": [["g1", "g2"], ["e1", "e2"], ["x1"], ["x2"], ["u1"], ["u2"], ["z1"], ["z2"]],
  "epistemic": {
    "a": [["g1", "g2"], ["e1", "e2"], ["x1", "x2"], ["u1", "u2"], ["z1", "z2"]],
    "b": [["g1", "g2"], ["e1", "e2"], ["x1", "x2"], ["u1", "u2"], ["z1", "z2"]]
  },
  "valuation": {"p": ["u1", "z1"], "q": ["e1", "x2"]},
  "horizon": 2,
  "interior": ["e1", "e2", "x1", "x2", "u1", "u2"],
  "level": {"g1": -2, "g2": -2, "e1": -1, "e2": -1, "x1": 0, "x2": 0, "u1": 1, "u2": 1, "z1": 2, "z2": 2}
})");
}

std::string projection_json(const std::vector<WorldId>& f, const KripkeModel& source, const KripkeModel& target) {
  nlohmann::json j = nlohmann::json::array();
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] >= 0) j.push_back({source.worlds[i], target.worlds[f[i]]});
  return j.dump(2) + "\n";
}

}  // namespace kx
