#include "kxstit/bdt.hpp"

#include <algorithm>
#include <functional>

#include "json.hpp"

namespace kx {

namespace {

[[noreturn]] void violation(const std::string& condition, const std::string& msg,
                            const std::vector<std::string>& histories = {}) {
  std::string hs;
  for (const auto& h : histories) hs += (hs.empty() ? "" : ",") + h;
  throw Error("BDTInvariantViolation", condition + ": " + msg, {{"condition", condition}, {"histories", hs}});
}

std::string world_name(const Situation& s) { return s.first + "_" + s.second; }

}  // namespace

std::vector<BDTScenario::History> BDTScenario::histories() const {
  std::set<std::string> known(moments.begin(), moments.end());
  if (known.size() != moments.size()) violation("tree", "duplicate moment");
  std::vector<std::string> roots;
  std::map<std::string, std::vector<std::string>> children;
  for (const auto& m : moments) {
    auto it = parent.find(m);
    if (it == parent.end()) {
      roots.push_back(m);
      continue;
    }
    if (!known.count(it->second)) violation("tree", "parent of " + m + " is not a moment");
    children[it->second].push_back(m);
  }
  if (roots.size() != 1) violation("tree", "expected exactly one root moment");
  for (const auto& [m, p] : parent)
    if (!known.count(m)) violation("tree", "parent given for unknown moment " + m);

  std::vector<History> out;
  std::set<std::string> seen;
  std::function<void(const std::string&, std::vector<std::string>&)> walk = [&](const std::string& m,
                                                                               std::vector<std::string>& path) {
    if (!seen.insert(m).second) violation("tree", "moment " + m + " reached twice");
    path.push_back(m);
    auto it = children.find(m);
    if (it == children.end()) {
      auto nm = history_names.find(m);
      out.push_back({nm == history_names.end() ? "h_" + m : nm->second, path});
    } else {
      for (const auto& c : it->second) walk(c, path);
    }
    path.pop_back();
  };
  std::vector<std::string> path;
  walk(roots.front(), path);
  if (seen.size() != moments.size()) violation("tree", "some moments are not reachable from the root");
  std::set<std::string> names;
  for (const auto& h : out)
    if (!names.insert(h.name).second) violation("tree", "duplicate history id " + h.name);
  // order by position of the leaf in the moment list
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < moments.size(); ++i) pos[moments[i]] = i;
  std::sort(out.begin(), out.end(),
            [&](const History& a, const History& b) { return pos[a.moments.back()] < pos[b.moments.back()]; });
  return out;
}

namespace {

struct Layout {
  std::vector<BDTScenario::History> hs;
  std::map<std::string, std::vector<std::string>> through;  // moment -> histories through it
  std::map<Situation, std::string> next;                    // situation -> following moment on its history
  std::set<Situation> sits;
};

Layout layout(const BDTScenario& s) {
  Layout l;
  l.hs = s.histories();
  for (const auto& h : l.hs)
    for (std::size_t i = 0; i < h.moments.size(); ++i) {
      l.through[h.moments[i]].push_back(h.name);
      l.sits.insert({h.moments[i], h.name});
      if (i + 1 < h.moments.size()) l.next[{h.moments[i], h.name}] = h.moments[i + 1];
    }
  return l;
}

// cell index per history through m, for agent a
std::map<std::string, int> cells_at(const BDTScenario& s, const Layout& l, const std::string& a, const std::string& m) {
  std::map<std::string, int> idx;
  const auto& hs = l.through.at(m);
  auto ai = s.choice_at.find(a);
  if (ai == s.choice_at.end() || !ai->second.count(m)) {
    for (const auto& h : hs) idx[h] = 0;
    return idx;
  }
  const auto& cells = ai->second.at(m);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].empty()) violation("choice", "empty cell for " + a + " at " + m);
    for (const auto& h : cells[c]) {
      if (std::find(hs.begin(), hs.end(), h) == hs.end())
        violation("choice", "history " + h + " does not pass through " + m, {h});
      if (!idx.emplace(h, static_cast<int>(c)).second)
        violation("choice", "history " + h + " in two cells of " + a + " at " + m, {h});
    }
  }
  for (const auto& h : hs)
    if (!idx.count(h)) violation("choice", "history " + h + " missing from " + a + "'s choice at " + m, {h});
  return idx;
}

std::map<Situation, int> epistemic_labels(const BDTScenario& s, const Layout& l, const std::string& a) {
  std::map<Situation, int> lab;
  int next = 0;
  auto it = s.epistemic_sit.find(a);
  if (it != s.epistemic_sit.end())
    for (const auto& cell : it->second) {
      for (const auto& sit : cell) {
        if (!l.sits.count(sit)) violation("epistemic", "unknown situation " + world_name(sit), {sit.second});
        if (!lab.emplace(sit, next).second)
          violation("epistemic", "situation " + world_name(sit) + " in two cells for " + a, {sit.second});
      }
      ++next;
    }
  for (const auto& sit : l.sits)
    if (!lab.count(sit)) lab[sit] = next++;
  return lab;
}

}  // namespace

void check_scenario(const BDTScenario& s) {
  Layout l = layout(s);
  for (const auto& [a, per] : s.choice_at) {
    if (std::find(s.agents.begin(), s.agents.end(), a) == s.agents.end())
      violation("choice", "unknown agent " + a);
    for (const auto& [m, cells] : per)
      if (!l.through.count(m)) violation("choice", "unknown moment " + m);
  }
  for (const auto& [m, hs] : l.through) {
    std::vector<std::map<std::string, int>> idx;
    for (const auto& a : s.agents) idx.push_back(cells_at(s, l, a, m));
    // no choice between undivided histories
    for (std::size_t i = 0; i < hs.size(); ++i)
      for (std::size_t j = i + 1; j < hs.size(); ++j) {
        auto ni = l.next.find({m, hs[i]}), nj = l.next.find({m, hs[j]});
        if (ni == l.next.end() || nj == l.next.end() || ni->second != nj->second) continue;
        for (std::size_t a = 0; a < s.agents.size(); ++a)
          if (idx[a][hs[i]] != idx[a][hs[j]])
            violation("NC", s.agents[a] + " separates undivided histories at " + m, {hs[i], hs[j]});
      }
    // independence of agency: every combination of cells is realized
    std::set<std::vector<int>> realized;
    std::vector<int> counts(s.agents.size(), 0);
    for (const auto& h : hs) {
      std::vector<int> v;
      for (std::size_t a = 0; a < s.agents.size(); ++a) {
        v.push_back(idx[a][h]);
        counts[a] = std::max(counts[a], idx[a][h] + 1);
      }
      realized.insert(v);
    }
    std::size_t total = 1;
    for (int c : counts) total *= static_cast<std::size_t>(c);
    if (realized.size() != total) violation("IA", "some combination of choices at " + m + " is empty", hs);
  }
  // no forget: indistinguishable situations have indistinguishable predecessors
  std::map<Situation, Situation> prev;
  for (const auto& [sit, nxt] : l.next) prev[{nxt, sit.second}] = sit;
  for (const auto& a : s.agents) {
    auto lab = epistemic_labels(s, l, a);
    for (const auto& x : l.sits)
      for (const auto& y : l.sits) {
        if (lab[x] != lab[y] || !(x < y)) continue;
        auto px = prev.find(x), py = prev.find(y);
        bool xr = px == prev.end(), yr = py == prev.end();
        if (xr && yr) continue;
        if (xr != yr || lab[px->second] != lab[py->second])
          violation("NoF", a + " confuses " + world_name(x) + " and " + world_name(y) +
                               " but not their predecessors", {x.second, y.second});
      }
  }
}

KripkeModel bdt_to_kripke(const BDTScenario& s) {
  check_scenario(s);
  Layout l = layout(s);
  KripkeModel m;
  m.agents = s.agents;
  const std::string root = l.hs.front().moments.front();

  std::vector<Situation> sits;
  std::map<std::string, std::size_t> mpos;
  for (std::size_t i = 0; i < s.moments.size(); ++i) mpos[s.moments[i]] = i;
  std::map<std::string, std::size_t> hpos;
  for (std::size_t i = 0; i < l.hs.size(); ++i) hpos[l.hs[i].name] = i;
  sits.assign(l.sits.begin(), l.sits.end());
  std::sort(sits.begin(), sits.end(), [&](const Situation& a, const Situation& b) {
    return std::make_pair(mpos[a.first], hpos[a.second]) < std::make_pair(mpos[b.first], hpos[b.second]);
  });

  int H = static_cast<int>(l.hs.size());
  auto pre = [&](int h) { return h; };
  std::map<Situation, WorldId> sid;
  for (const auto& h : l.hs) m.worlds.push_back("pre_" + h.name);
  for (const auto& sit : sits) {
    sid[sit] = static_cast<WorldId>(m.worlds.size());
    m.worlds.push_back(world_name(sit));
  }
  auto post = [&](int h) { return H + static_cast<int>(sits.size()) + h; };
  for (const auto& h : l.hs) m.worlds.push_back("post_" + h.name);
  int n = m.size();

  m.succ.assign(n, kNoWorld);
  for (int h = 0; h < H; ++h) {
    const auto& path = l.hs[h].moments;
    m.succ[pre(h)] = sid[{path.front(), l.hs[h].name}];
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      m.succ[sid[{path[i], l.hs[h].name}]] = sid[{path[i + 1], l.hs[h].name}];
    m.succ[sid[{path.back(), l.hs[h].name}]] = post(h);
    m.succ[post(h)] = post(h);
  }

  // labels: pre-worlds share label 0, post-worlds get fresh labels
  auto fill = [&](const std::function<int(const Situation&)>& of_sit, bool pre_copies_root,
                  const std::function<int(int)>& pre_label) {
    std::vector<int> lab(n);
    int fresh = 1 << 20;
    for (int h = 0; h < H; ++h) {
      lab[pre(h)] = pre_copies_root ? pre_label(h) : -1;
      lab[post(h)] = fresh++;
    }
    for (const auto& sit : sits) lab[sid[sit]] = of_sit(sit);
    return Partition::from_labels(lab);
  };

  m.box = fill([&](const Situation& x) { return static_cast<int>(mpos[x.first]); }, false, nullptr);
  for (const auto& a : s.agents) {
    std::map<std::string, std::map<std::string, int>> idx;
    for (const auto& [mo, hs] : l.through) idx[mo] = cells_at(s, l, a, mo);
    m.choice.push_back(fill(
        [&](const Situation& x) { return static_cast<int>(mpos[x.first]) * 1024 + idx[x.first][x.second]; }, false,
        nullptr));
    auto lab = epistemic_labels(s, l, a);
    int offset = static_cast<int>(lab.size()) + 1;
    m.epistemic.push_back(fill([&](const Situation& x) { return lab[x]; }, true,
                               [&](int h) { return offset + lab[{root, l.hs[h].name}]; }));
  }
  m.reindex();
  m.choice_ags = intersect_choices(m);

  for (const auto& [p, ext] : s.valuation_sit) {
    std::vector<bool> v(n, false);
    for (const auto& sit : ext) {
      if (!sid.count(sit)) violation("valuation", "unknown situation " + world_name(sit), {sit.second});
      v[sid[sit]] = true;
    }
    for (int h = 0; h < H; ++h) {
      v[pre(h)] = v[sid[{l.hs[h].moments.front(), l.hs[h].name}]];
      v[post(h)] = v[sid[{l.hs[h].moments.back(), l.hs[h].name}]];
    }
    m.valuation[p] = std::move(v);
  }
  m.reindex();
  return m;
}

BDTScenario figure1_scenario(char which) {
  if (which != 'a' && which != 'b')
    throw Error("BadScenario", "figure 1 case must be a or b", {{"case", std::string(1, which)}});
  BDTScenario s;
  s.agents = {"benji", "ethan", "luther"};
  auto M = [](int i) { return "m" + std::to_string(i); };
  auto Hn = [](int k) { return "h" + std::to_string(k); };
  for (int i = 1; i <= 21; ++i) s.moments.push_back(M(i));
  for (int i = 2; i <= 5; ++i) s.parent[M(i)] = M(1);
  // leaf m(5+k) closes history h_k; h1-h4 pass m2, h5-h8 m3, h9-h12 m4, h13-h16 m5
  auto mid = [&](int k) { return M(2 + (k - 1) / 4); };
  auto leaf = [&](int k) { return M(5 + k); };
  for (int k = 1; k <= 16; ++k) {
    s.parent[leaf(k)] = mid(k);
    s.history_names[leaf(k)] = Hn(k);
  }
  auto hs = [&](std::initializer_list<int> ks) {
    std::vector<std::string> out;
    for (int k : ks) out.push_back(Hn(k));
    return out;
  };
  s.choice_at["ethan"][M(1)] = {hs({1, 2, 3, 4}), hs({5, 6, 7, 8}), hs({9, 10, 11, 12}), hs({13, 14, 15, 16})};
  // per middle moment: (R_L,R_B), (G_L,R_B), (R_L,G_B), (G_L,G_B)
  const int grid[4][4] = {{2, 1, 3, 4}, {6, 5, 7, 8}, {10, 9, 11, 12}, {14, 13, 15, 16}};
  std::vector<int> red_l, green_l, red_b, green_b;
  for (int i = 0; i < 4; ++i) {
    const int* g = grid[i];
    s.choice_at["luther"][M(2 + i)] = {hs({g[0], g[2]}), hs({g[1], g[3]})};
    s.choice_at["benji"][M(2 + i)] = {hs({g[0], g[1]}), hs({g[2], g[3]})};
    red_l.insert(red_l.end(), {g[0], g[2]});
    green_l.insert(green_l.end(), {g[1], g[3]});
    red_b.insert(red_b.end(), {g[0], g[1]});
    green_b.insert(green_b.end(), {g[2], g[3]});
  }

  auto at_mid = [&](const std::vector<int>& ks) {
    std::vector<Situation> out;
    for (int k : ks) out.push_back({mid(k), Hn(k)});
    return out;
  };
  auto at_leaf = [&](std::initializer_list<int> ks) {
    std::vector<Situation> out;
    for (int k : ks) out.push_back({leaf(k), Hn(k)});
    return out;
  };
  std::vector<Situation> root_layer;
  for (int k = 1; k <= 16; ++k) root_layer.push_back({M(1), Hn(k)});
  const std::vector<std::vector<Situation>> shared_leaves = {at_leaf({1, 5, 13}), at_leaf({6, 10, 14}),
                                                            at_leaf({3, 11, 15}), at_leaf({4, 8, 12, 16})};

  auto& benji = s.epistemic_sit["benji"];
  benji = {root_layer, at_mid(red_b), at_mid(green_b)};
  benji.insert(benji.end(), shared_leaves.begin(), shared_leaves.end());

  auto& luther = s.epistemic_sit["luther"];
  luther = {root_layer};
  if (which == 'a') {
    luther.push_back(at_mid(red_l));
    luther.push_back(at_mid(green_l));
    luther.insert(luther.end(), shared_leaves.begin(), shared_leaves.end());
  } else {
    // luther tells the middle moments apart; leaves stay singletons
    for (int i = 0; i < 4; ++i) {
      luther.push_back(at_mid({grid[i][0], grid[i][2]}));
      luther.push_back(at_mid({grid[i][1], grid[i][3]}));
    }
  }
  s.epistemic_sit["ethan"] = {};

  auto put = [&](const std::string& p, std::initializer_list<int> ks) {
    for (int k : ks) s.valuation_sit[p].insert({leaf(k), Hn(k)});
  };
  put("d_L", {1, 8, 10});
  put("d_B", {3, 6, 12});
  put("s", {2, 7, 9});
  put("d", {4, 5, 11, 13, 14, 15, 16});
  for (int k : {4, 5, 11, 13, 14, 15, 16}) {
    s.valuation_sit["d_L"].insert({leaf(k), Hn(k)});
    s.valuation_sit["d_B"].insert({leaf(k), Hn(k)});
  }
  for (int k : red_l) s.valuation_sit["r_L"].insert({leaf(k), Hn(k)});
  // benji's detonator is in play while ethan works on it: middle moments m2, m4
  for (int k : {1, 2, 3, 4, 9, 10, 11, 12}) {
    s.valuation_sit["f_B"].insert({mid(k), Hn(k)});
    s.valuation_sit["f_B"].insert({leaf(k), Hn(k)});
  }
  return s;
}

namespace {

using json = nlohmann::ordered_json;

json sit_json(const Situation& x) { return json::array({x.first, x.second}); }

Situation sit_of(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error("SchemaError", "situation must be [moment, history]");
  return {j[0].get<std::string>(), j[1].get<std::string>()};
}

}  // namespace

std::string save_scenario(const BDTScenario& s) {
  json doc;
  doc["format_version"] = 1;
  doc["agents"] = s.agents;
  doc["moments"] = s.moments;
  json par = json::object();
  for (const auto& [k, v] : s.parent) par[k] = v;
  doc["parent"] = par;
  json hn = json::object();
  for (const auto& [k, v] : s.history_names) hn[k] = v;
  doc["history_names"] = hn;
  json ch = json::object();
  for (const auto& [a, per] : s.choice_at) {
    ch[a] = json::object();
    for (const auto& [m, cells] : per) ch[a][m] = cells;
  }
  doc["choice_at"] = ch;
  json ep = json::object();
  for (const auto& [a, cells] : s.epistemic_sit) {
    ep[a] = json::array();
    for (const auto& cell : cells) {
      json c = json::array();
      for (const auto& x : cell) c.push_back(sit_json(x));
      ep[a].push_back(c);
    }
  }
  doc["epistemic_sit"] = ep;
  json val = json::object();
  for (const auto& [p, ext] : s.valuation_sit) {
    val[p] = json::array();
    for (const auto& x : ext) val[p].push_back(sit_json(x));
  }
  doc["valuation_sit"] = val;
  return doc.dump(2) + "\n";
}

BDTScenario load_scenario(const std::string& document) {
  try {
    json doc = json::parse(document);
    if (doc.value("format_version", 0) != 1) throw Error("SchemaError", "unsupported format_version");
    BDTScenario s;
    s.agents = doc.at("agents").get<std::vector<std::string>>();
    s.moments = doc.at("moments").get<std::vector<std::string>>();
    s.parent = doc.at("parent").get<std::map<std::string, std::string>>();
    if (doc.contains("history_names"))
      s.history_names = doc["history_names"].get<std::map<std::string, std::string>>();
    if (doc.contains("choice_at"))
      for (auto& [a, per] : doc["choice_at"].items())
        for (auto& [m, cells] : per.items())
          s.choice_at[a][m] = cells.get<std::vector<std::vector<std::string>>>();
    if (doc.contains("epistemic_sit"))
      for (auto& [a, cells] : doc["epistemic_sit"].items()) {
        auto& out = s.epistemic_sit[a];
        for (const auto& cell : cells) {
          std::vector<Situation> c;
          for (const auto& x : cell) c.push_back(sit_of(x));
          out.push_back(std::move(c));
        }
      }
    if (doc.contains("valuation_sit"))
      for (auto& [p, ext] : doc["valuation_sit"].items())
        for (const auto& x : ext) s.valuation_sit[p].insert(sit_of(x));
    return s;
  } catch (const json::exception& e) {
    throw Error("SchemaError", std::string("malformed scenario: ") + e.what());
  }
}

}  // namespace kx
