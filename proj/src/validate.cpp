#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "kxstit/model.hpp"

namespace kx {

namespace {

struct Ctx {
  const KripkeModel& m;
  const std::vector<bool>& in;  // universally quantified worlds
  bool inner(WorldId w) const { return w != kNoWorld && in[w]; }
};

ConditionCheck verdict(std::string name, std::set<WorldId> witness, std::string first) {
  ConditionCheck c;
  c.name = std::move(name);
  c.pass = witness.empty();
  c.witness.assign(witness.begin(), witness.end());
  c.explanation = c.pass ? "holds" : first;
  return c;
}

std::string nm(const KripkeModel& m, WorldId w) { return m.worlds[w]; }

ConditionCheck check_eq(const Ctx& x) {
  // Partitions are equivalences by construction; what remains is that R_X is
  // serial and deterministic on the quantified worlds.
  std::set<WorldId> bad;
  std::string first;
  for (WorldId w = 0; w < x.m.size(); ++w)
    if (x.inner(w) && x.m.succ[w] == kNoWorld) {
      if (bad.empty()) first = "R_X has no successor at " + nm(x.m, w);
      bad.insert(w);
    }
  return verdict("EQ", bad, first);
}

ConditionCheck check_inverse(const Ctx& x) {
  std::set<WorldId> bad;
  std::string first;
  for (WorldId w = 0; w < x.m.size(); ++w) {
    if (!x.inner(w)) continue;
    std::size_t k = x.m.preds[w].size();
    if (k != 1) {
      if (bad.empty())
        first = nm(x.m, w) + " has " + std::to_string(k) + " R_X-predecessors, so R_X o R_Y is not the identity there";
      bad.insert(w);
    }
  }
  return verdict("Inverse", bad, first);
}

// w R_X u R_box v  =>  w R_box z R_X v
ConditionCheck check_nx(const Ctx& x) {
  std::set<WorldId> bad;
  std::string first;
  for (WorldId w = 0; w < x.m.size(); ++w) {
    if (!x.inner(w)) continue;
    WorldId u = x.m.succ[w];
    if (!x.inner(u)) continue;
    for (WorldId v : x.m.box.cell_of(u)) {
      if (!x.inner(v)) continue;
      const auto& pv = x.m.preds[v];
      bool ok = std::any_of(pv.begin(), pv.end(), [&](WorldId z) { return x.m.box.same(z, w); });
      if (!ok) {
        if (bad.empty())
          first = nm(x.m, w) + " R_X " + nm(x.m, u) + " R_box " + nm(x.m, v) + " but no box-alternative of " +
                  nm(x.m, w) + " has successor " + nm(x.m, v);
        bad.insert(w);
        break;
      }
    }
  }
  return verdict("NX", bad, first);
}

ConditionCheck check_set(const Ctx& x) {
  std::set<WorldId> bad;
  std::string first;
  auto scan = [&](const Partition& p, const std::string& who) {
    for (WorldId w = 0; w < x.m.size(); ++w) {
      if (!x.inner(w)) continue;
      for (WorldId v : p.cell_of(w))
        if (!x.m.box.same(v, w)) {
          if (bad.empty())
            first = "choice cell of " + who + " at " + nm(x.m, w) + " contains " + nm(x.m, v) +
                    " from another box class";
          bad.insert(w);
          break;
        }
    }
  };
  for (int a = 0; a < x.m.agent_count(); ++a) scan(x.m.choice[a], x.m.agents[a]);
  scan(x.m.choice_ags, "Ags");
  return verdict("SET", bad, first);
}

// Box classes that contain at least one quantified world.
std::vector<int> live_classes(const Ctx& x) {
  std::vector<int> out;
  for (int c = 0; c < x.m.box.class_count(); ++c) {
    const auto& cell = x.m.box.cell(c);
    if (std::any_of(cell.begin(), cell.end(), [&](WorldId w) { return x.inner(w); })) out.push_back(c);
  }
  return out;
}

// Distinct cells of p met by the box class c, each given by its members in c.
std::vector<std::vector<WorldId>> cells_in_class(const Partition& p, const Partition& box, int c) {
  std::map<int, std::vector<WorldId>> by;
  for (WorldId w : box.cell(c)) by[p.class_of(w)].push_back(w);
  std::vector<std::vector<WorldId>> out;
  for (auto& [k, v] : by) out.push_back(std::move(v));
  std::sort(out.begin(), out.end());
  return out;
}

ConditionCheck check_ia(const Ctx& x) {
  std::set<WorldId> bad;
  std::string first;
  int k = x.m.agent_count();
  for (int c : live_classes(x)) {
    std::vector<std::vector<std::vector<WorldId>>> per(k);
    for (int a = 0; a < k; ++a) per[a] = cells_in_class(x.m.choice[a], x.m.box, c);
    std::vector<std::size_t> pick(k, 0);
    bool done = k == 0;
    while (!done) {
      std::vector<WorldId> common = per.empty() ? std::vector<WorldId>{} : per[0][pick[0]];
      for (int a = 1; a < k && !common.empty(); ++a) {
        std::vector<WorldId> next;
        std::set_intersection(common.begin(), common.end(), per[a][pick[a]].begin(), per[a][pick[a]].end(),
                              std::back_inserter(next));
        common = std::move(next);
      }
      if (common.empty()) {
        // report the first empty selection by one representative per chosen cell
        std::ostringstream os;
        os << "empty selection:";
        for (int a = 0; a < k; ++a) {
          os << " " << x.m.agents[a] << " -> cell of " << nm(x.m, per[a][pick[a]].front());
          bad.insert(per[a][pick[a]].front());
        }
        first = os.str();
        break;
      }
      int a = k - 1;
      while (a >= 0 && ++pick[a] == per[a].size()) pick[a--] = 0;
      done = a < 0;
    }
    if (!bad.empty()) break;
  }
  return verdict("IA", bad, first);
}

// w P v' R_X o' R_box o  =>  w P z R_X o, for a choice partition P
ConditionCheck check_na_like(const Ctx& x, const std::string& name, const std::vector<const Partition*>& ps,
                             const std::vector<std::string>& who) {
  std::set<WorldId> bad;
  std::string first;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const Partition& p = *ps[i];
    for (const auto& cell : p.cells()) {
      if (std::none_of(cell.begin(), cell.end(), [&](WorldId w) { return x.inner(w); })) continue;
      std::set<WorldId> image;
      for (WorldId z : cell)
        if (x.m.succ[z] != kNoWorld) image.insert(x.m.succ[z]);
      bool failed = false;
      for (WorldId v : cell) {
        if (!x.inner(v) || !x.inner(x.m.succ[v])) continue;
        for (WorldId o : x.m.box.cell_of(x.m.succ[v])) {
          if (x.inner(o) && !image.count(o)) {
            if (bad.empty())
              first = "for " + who[i] + ": " + nm(x.m, v) + " R_X " + nm(x.m, x.m.succ[v]) + " R_box " + nm(x.m, o) +
                      " but " + nm(x.m, o) + " is not a successor of the choice cell";
            failed = true;
            break;
          }
        }
        if (failed) break;
      }
      if (failed)
        for (WorldId w : cell)
          if (x.inner(w)) bad.insert(w);
    }
  }
  return verdict(name, bad, first);
}

ConditionCheck check_unif_h(const Ctx& x) {
  std::set<WorldId> bad;
  std::string first;
  const auto& box = x.m.box;
  for (int a = 0; a < x.m.agent_count(); ++a) {
    const Partition& ep = x.m.epistemic[a];
    // box classes epistemically reachable from w (any world / quantified world)
    auto reach = [&](WorldId w, bool only_inner) {
      std::set<int> out;
      for (WorldId u : ep.cell_of(w))
        if (!only_inner || x.inner(u)) out.insert(box.class_of(u));
      return out;
    };
    for (int c : live_classes(x)) {
      std::set<int> linked;
      for (WorldId v : box.cell(c))
        if (x.inner(v)) {
          auto r = reach(v, true);
          linked.insert(r.begin(), r.end());
        }
      for (WorldId v : box.cell(c)) {
        if (!x.inner(v)) continue;
        auto r = reach(v, false);
        for (int target : linked)
          if (!r.count(target)) {
            if (bad.empty())
              first = "for " + x.m.agents[a] + ": class of " + nm(x.m, v) + " is linked to class of " +
                      nm(x.m, box.cell(target).front()) + " but " + nm(x.m, v) + " has no indistinguishable world there";
            bad.insert(v);
            break;
          }
      }
    }
  }
  return verdict("Unif-H", bad, first);
}

// w R_X u ~ v  =>  w ~ z R_X v
ConditionCheck check_nof(const Ctx& x) {
  std::set<WorldId> bad;
  std::string first;
  for (int a = 0; a < x.m.agent_count(); ++a) {
    const Partition& ep = x.m.epistemic[a];
    for (WorldId w = 0; w < x.m.size(); ++w) {
      if (!x.inner(w)) continue;
      WorldId u = x.m.succ[w];
      if (!x.inner(u)) continue;
      for (WorldId v : ep.cell_of(u)) {
        if (!x.inner(v)) continue;
        const auto& pv = x.m.preds[v];
        if (std::none_of(pv.begin(), pv.end(), [&](WorldId z) { return ep.same(z, w); })) {
          if (bad.empty())
            first = "for " + x.m.agents[a] + ": " + nm(x.m, w) + " R_X " + nm(x.m, u) + " ~ " + nm(x.m, v) +
                    " but no predecessor of " + nm(x.m, v) + " is indistinguishable from " + nm(x.m, w);
          bad.insert(w);
          break;
        }
      }
    }
  }
  return verdict("NoF", bad, first);
}

ConditionCheck check_additivity(const Ctx& x, AdditivityMode mode) {
  std::set<WorldId> bad;
  std::string first;
  Partition meet = intersect_choices(x.m);
  for (WorldId w = 0; w < x.m.size(); ++w) {
    if (!x.inner(w)) continue;
    const auto& ags = x.m.choice_ags.cell_of(w);
    const auto& inter = meet.cell_of(w);
    bool ok = mode == AdditivityMode::Actual ? ags == inter
                                              : std::includes(inter.begin(), inter.end(), ags.begin(), ags.end());
    if (!ok) {
      if (bad.empty())
        first = std::string("Ags-cell of ") + nm(x.m, w) +
                (mode == AdditivityMode::Actual ? " differs from" : " is not contained in") +
                " the intersection of the agents' cells";
      bad.insert(w);
    }
  }
  return verdict("Additivity", bad, first);
}

ConditionCheck check_card(const Ctx& x, int n) {
  std::set<WorldId> bad;
  std::string first;
  for (int c : live_classes(x)) {
    auto count = [&](const Partition& p) { return static_cast<int>(cells_in_class(p, x.m.box, c).size()); };
    WorldId rep = x.m.box.cell(c).front();
    int ags = count(x.m.choice_ags);
    if (ags > n) {
      if (bad.empty())
        first = "box class of " + nm(x.m, rep) + " has " + std::to_string(ags) + " Ags-cells, bound is " +
                std::to_string(n);
      bad.insert(rep);
    }
    for (int a = 0; a < x.m.agent_count(); ++a) {
      int k = count(x.m.choice[a]);
      if (k > n) {
        if (bad.empty())
          first = "box class of " + nm(x.m, rep) + " has " + std::to_string(k) + " cells for " + x.m.agents[a] +
                  ", bound is " + std::to_string(n);
        bad.insert(rep);
      }
    }
  }
  return verdict("CARD", bad, first);
}

}  // namespace

const std::vector<std::string>& condition_names() {
  static const std::vector<std::string> names = {"Additivity", "CARD", "EQ",  "IA",  "Inverse", "NA",
                                                 "NAgs",       "NX",   "NoF", "SET", "Unif-H"};
  return names;
}

bool FrameReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const ConditionCheck& c) { return c.pass; });
}

const ConditionCheck& FrameReport::get(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw Error("UnknownCondition", "no condition named '" + name + "'", {{"condition", name}});
}

std::vector<std::string> FrameReport::failed() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.pass) out.push_back(c.name);
  return out;
}

FrameReport validate_frame(const KripkeModel& m, AdditivityMode mode, int n) {
  return validate_frame(m, mode, n, std::vector<bool>(m.size(), true));
}

FrameReport validate_frame(const KripkeModel& m, AdditivityMode mode, int n, const std::vector<bool>& interior) {
  if (n < 1) throw Error("InvalidBound", "n must be positive", {{"n", std::to_string(n)}});
  Ctx x{m, interior};
  FrameReport r;
  r.mode = mode;
  r.n_bound = n;
  std::vector<const Partition*> alphas;
  for (const auto& p : m.choice) alphas.push_back(&p);
  r.checks.push_back(check_additivity(x, mode));
  r.checks.push_back(check_card(x, n));
  r.checks.push_back(check_eq(x));
  r.checks.push_back(check_ia(x));
  r.checks.push_back(check_inverse(x));
  r.checks.push_back(check_na_like(x, "NA", alphas, m.agents));
  r.checks.push_back(check_na_like(x, "NAgs", {&m.choice_ags}, {"Ags"}));
  r.checks.push_back(check_nx(x));
  r.checks.push_back(check_nof(x));
  r.checks.push_back(check_set(x));
  r.checks.push_back(check_unif_h(x));
  std::sort(r.checks.begin(), r.checks.end(),
            [](const ConditionCheck& a, const ConditionCheck& b) { return a.name < b.name; });
  return r;
}

FrameReport validate_window(const WindowModel& w, AdditivityMode mode, int n) {
  return validate_frame(w.model, mode, n, w.interior);
}

std::string mode_name(AdditivityMode mode) {
  return mode == AdditivityMode::Actual ? "actual" : "super_additive";
}

AdditivityMode parse_mode(const std::string& s) {
  if (s == "actual") return AdditivityMode::Actual;
  if (s == "super_additive" || s == "super-additive") return AdditivityMode::SuperAdditive;
  throw Error("BadMode", "mode must be actual or super_additive", {{"mode", s}});
}

std::string report_json(const FrameReport& r, const KripkeModel& m) {
  nlohmann::ordered_json j;
  j["mode"] = mode_name(r.mode);
  j["n"] = r.n_bound;
  j["ok"] = r.ok();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    std::vector<std::string> wit;
    for (WorldId w : c.witness) wit.push_back(m.worlds[w]);
    j["checks"].push_back({{"condition", c.name}, {"pass", c.pass}, {"witness", wit}, {"explanation", c.explanation}});
  }
  return j.dump(2) + "\n";
}

int tight_bound(const KripkeModel& m) {
  int best = 1;
  for (int c = 0; c < m.box.class_count(); ++c) {
    best = std::max(best, static_cast<int>(cells_in_class(m.choice_ags, m.box, c).size()));
    for (const auto& p : m.choice) best = std::max(best, static_cast<int>(cells_in_class(p, m.box, c).size()));
  }
  return best;
}

}  // namespace kx
