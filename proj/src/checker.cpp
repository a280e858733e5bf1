#include "kxstit/checker.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <unordered_map>

#include "json.hpp"

namespace kx {

Partition common_knowledge_classes(const KripkeModel& m) {
  std::vector<int> parent(m.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const auto& ep : m.epistemic)
    for (const auto& cell : ep.cells())
      for (WorldId w : cell) parent[find(w)] = find(cell.front());
  std::vector<int> label(m.size());
  for (int w = 0; w < m.size(); ++w) label[w] = find(w);
  return Partition::from_labels(label);
}

namespace {

WorldId next_of(const KripkeModel& m, WorldId w) {
  WorldId v = m.succ[w];
  if (v == kNoWorld)
    throw Error("SuccNotTotal", "succ undefined at world '" + m.worlds[w] + "'", {{"world", m.worlds[w]}});
  return v;
}

class TopDown {
 public:
  explicit TopDown(const KripkeModel& m) : m_(m) {}

  bool at(const Formula& f, WorldId w) {
    auto key = std::make_pair(f.id(), w);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    bool r = compute(f, w);
    memo_.emplace(key, r);
    return r;
  }

 private:
  struct Hash {
    std::size_t operator()(const std::pair<const void*, WorldId>& k) const {
      return std::hash<const void*>()(k.first) * 31u + static_cast<std::size_t>(k.second);
    }
  };

  bool all(const std::vector<WorldId>& ws, const Formula& f) {
    return std::all_of(ws.begin(), ws.end(), [&](WorldId v) { return at(f, v); });
  }

  bool compute(const Formula& f, WorldId w) {
    switch (f.op()) {
      case Op::Atom: return m_.holds(f.name(), w);
      case Op::Not: return !at(f.child(0), w);
      case Op::And: return at(f.child(0), w) && at(f.child(1), w);
      case Op::Or: return at(f.child(0), w) || at(f.child(1), w);
      case Op::Implies: return !at(f.child(0), w) || at(f.child(1), w);
      case Op::Box: return all(m_.box.cell_of(w), f.child(0));
      case Op::Diamond: {
        const auto& c = m_.box.cell_of(w);
        return std::any_of(c.begin(), c.end(), [&](WorldId v) { return at(f.child(0), v); });
      }
      case Op::Next: return at(f.child(0), next_of(m_, w));
      case Op::Yesterday: return all(m_.preds[w], f.child(0));
      case Op::Stit: return all(m_.choice[m_.agent(f.name())].cell_of(w), f.child(0));
      case Op::StitAgs: return all(m_.choice_ags.cell_of(w), f.child(0));
      case Op::Knows: return all(m_.epistemic[m_.agent(f.name())].cell_of(w), f.child(0));
      case Op::Common:
        if (!ck_) ck_ = common_knowledge_classes(m_);
        return all(ck_->cell_of(w), f.child(0));
      default: throw Error("Internal", "unexpanded macro in eval");
    }
  }

  const KripkeModel& m_;
  std::unordered_map<std::pair<const void*, WorldId>, bool, Hash> memo_;
  std::optional<Partition> ck_;
};

}  // namespace

bool eval(const KripkeModel& m, WorldId w, const Formula& f) {
  if (w < 0 || w >= m.size()) throw Error("UnknownWorld", "world index out of range", {{"world", std::to_string(w)}});
  Formula g = expand_macros(f);  // kept alive for the memo keys
  return TopDown(m).at(g, w);
}

bool eval(const KripkeModel& m, const std::string& world, const Formula& f) { return eval(m, m.world(world), f); }

std::vector<bool> extension(const KripkeModel& m, const Formula& f) {
  Formula g = normalize(f);
  int n = m.size();
  std::map<std::string, std::vector<bool>> table;
  auto by_cells = [&](const Partition& p, const std::vector<bool>& sub) {
    std::vector<bool> out(n);
    for (const auto& cell : p.cells()) {
      bool v = std::all_of(cell.begin(), cell.end(), [&](WorldId u) { return sub[u]; });
      for (WorldId u : cell) out[u] = v;
    }
    return out;
  };
  std::optional<Partition> ck;
  for (const Formula& s : subformulas(g)) {
    std::vector<bool> ext(n);
    auto sub = [&](std::size_t i) -> const std::vector<bool>& { return table.at(s.child(i).key()); };
    switch (s.op()) {
      case Op::Atom:
        for (int w = 0; w < n; ++w) ext[w] = m.holds(s.name(), w);
        break;
      case Op::Not:
        for (int w = 0; w < n; ++w) ext[w] = !sub(0)[w];
        break;
      case Op::And:
        for (int w = 0; w < n; ++w) ext[w] = sub(0)[w] && sub(1)[w];
        break;
      case Op::Box: ext = by_cells(m.box, sub(0)); break;
      case Op::Next:
        for (int w = 0; w < n; ++w) ext[w] = sub(0)[next_of(m, w)];
        break;
      case Op::Yesterday: {
        std::fill(ext.begin(), ext.end(), true);
        for (int w = 0; w < n; ++w)
          if (!sub(0)[w] && m.succ[w] != kNoWorld) ext[m.succ[w]] = false;
        break;
      }
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

Validity valid_on_model(const KripkeModel& m, const Formula& f) {
  auto ext = extension(m, f);
  for (int w = 0; w < m.size(); ++w)
    if (!ext[w]) return {false, w};
  return {true, std::nullopt};
}

KnowledgeReport knowledge_report(const KripkeModel& m, WorldId w, const std::string& agent, const Formula& phi,
                                 bool check_frame) {
  m.agent(agent);
  KnowledgeReport r;
  r.agent = agent;
  r.target = phi;
  r.world = w;
  r.in_fragment = in_next_stit_fragment(phi);
  if (!r.in_fragment) r.warnings.push_back("target lies outside the [a]X / [Ags]X fragment");
  if (check_frame) {
    auto rep = validate_frame(m, AdditivityMode::Actual, tight_bound(m));
    if (!rep.ok()) {
      std::string names;
      for (const auto& c : rep.failed()) names += (names.empty() ? "" : ",") + c;
      r.warnings.push_back("model is not a valid frame (failed: " + names + "); flags computed anyway");
    }
  }
  auto run = [&](const std::string& flag, const Formula& f) {
    Formula e = expand_macros(f);
    r.expanded.emplace_back(flag, print(e));
    return eval(m, w, e);
  };
  r.ex_ante = run("ex_ante", Formula::ex_ante(agent, phi));
  r.ex_interim = run("ex_interim", Formula::ex_interim(agent, phi));
  r.ex_post = run("ex_post", Formula::ex_post(agent, phi));
  r.know_how = run("know_how", Formula::know_how(agent, phi));
  r.does = run("does", Formula::stit(agent, Formula::next(phi)));
  r.knowingly_does = r.ex_interim;
  return r;
}

std::string knowledge_report_json(const KnowledgeReport& r, const KripkeModel& m) {
  nlohmann::ordered_json j;
  j["agent"] = r.agent;
  j["formula"] = print(r.target);
  j["world"] = m.worlds[r.world];
  j["flags"] = {{"does", r.does},         {"ex_ante", r.ex_ante},       {"ex_interim", r.ex_interim},
                {"ex_post", r.ex_post},   {"know_how", r.know_how},     {"knowingly_does", r.knowingly_does}};
  j["in_fragment"] = r.in_fragment;
  j["expanded"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.expanded) j["expanded"][k] = v;
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

RefinementReport check_refinement(const KripkeModel& m, const std::vector<std::string>& agents,
                                  const std::vector<Formula>& formulas) {
  RefinementReport r;
  for (const auto& a : agents)
    for (const auto& phi : formulas) {
      auto ante = Formula::ex_ante(a, phi), interim = Formula::ex_interim(a, phi), post = Formula::ex_post(a, phi);
      const std::pair<const char*, Formula> cases[] = {
          {"ex_ante->ex_interim", Formula::implies(ante, interim)},
          {"ex_interim->ex_post", Formula::implies(interim, post)},
      };
      for (const auto& [name, f] : cases) {
        ++r.checked;
        auto v = valid_on_model(m, f);
        if (!v.valid) r.failures.push_back({a, phi, name, *v.counterexample});
      }
    }
  return r;
}

}  // namespace kx
