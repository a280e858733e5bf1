#include "kxstit/axioms.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <random>
#include <set>

#include "json.hpp"
#include "kxstit/checker.hpp"
#include "kxstit/gen.hpp"

namespace kx {

namespace {

using F = Formula;

F iff(const F& a, const F& b) { return F::conj(F::implies(a, b), F::implies(b, a)); }

F big_and(const std::vector<F>& fs) {
  F out = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) out = F::conj(out, fs[i]);
  return out;
}

F big_or(const std::vector<F>& fs) {
  F out = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) out = F::disj(out, fs[i]);
  return out;
}

// K, T, 4 and 5 for a box-like operator
F s5(const std::function<F(F)>& box, const std::function<F(F)>& dia, const F& p, const F& q) {
  return big_and({F::implies(box(F::implies(p, q)), F::implies(box(p), box(q))), F::implies(box(p), p),
                  F::implies(box(p), box(box(p))), F::implies(dia(p), box(dia(p)))});
}

// bigwedge_k <>((bigwedge_{i<k} ~phi_i) & B phi_k) -> bigvee_k phi_k
F counting(const std::function<F(F)>& cell, const std::vector<F>& phis) {
  std::vector<F> conj;
  for (std::size_t k = 0; k < phis.size(); ++k) {
    F body = cell(phis[k]);
    if (k > 0) {
      std::vector<F> negs;
      for (std::size_t i = 0; i < k; ++i) negs.push_back(F::neg(phis[i]));
      body = F::conj(big_and(negs), body);
    }
    conj.push_back(F::diamond(body));
  }
  return F::implies(big_and(conj), big_or(phis));
}

[[noreturn]] void arity(const std::string& schema, const std::string& msg) {
  throw Error("ArityMismatch", schema + ": " + msg, {{"schema", schema}});
}

}  // namespace

const std::vector<SchemaInfo>& axiom_schemata() {
  static const std::vector<SchemaInfo> s = {
      {"S5(box)", 2, 0, false}, {"S5([a])", 2, 1, false}, {"S5([Ags])", 2, 0, false}, {"S5(K)", 2, 1, false},
      {"In1", 1, 0, false},     {"In2", 1, 0, false},     {"DET.S.X", 1, 0, false},   {"DET.S.Y", 1, 0, false},
      {"SET", 1, 1, false},     {"NA", 1, 1, false},      {"NAgs", 1, 0, false},      {"GA", 1, 1, false},
      {"IA", -1, -1, false},    {"NoF", 1, 1, false},     {"Unif-H", 1, 1, false},    {"AgsPC_n", -1, 0, false},
  };
  return s;
}

const std::vector<SchemaInfo>& derived_schemata() {
  static const std::vector<SchemaInfo> s = {{"NX", 1, 0, true}, {"NY", 1, 0, true}, {"APC_n", -1, 1, true}};
  return s;
}

const SchemaInfo& schema_info(const std::string& name) {
  for (const auto* list : {&axiom_schemata(), &derived_schemata()})
    for (const auto& s : *list)
      if (s.name == name) return s;
  throw Error("UnknownSchema", "unknown schema '" + name + "'", {{"schema", name}});
}

Formula instantiate(const std::string& schema, const std::vector<Formula>& fills, const std::vector<std::string>& agents,
                    std::optional<int> n) {
  const SchemaInfo& info = schema_info(schema);
  if (schema == "IA") {
    if (agents.empty()) arity(schema, "needs at least one agent");
    if (fills.size() != agents.size()) arity(schema, "needs one fill per agent");
    if (std::set<std::string>(agents.begin(), agents.end()).size() != agents.size())
      throw Error("DuplicateAgents", "IA needs pairwise distinct agents", {{"schema", schema}});
    std::vector<F> dias, stits;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      dias.push_back(F::diamond(F::stit(agents[i], fills[i])));
      stits.push_back(F::stit(agents[i], fills[i]));
    }
    return F::implies(big_and(dias), F::diamond(big_and(stits)));
  }
  if (info.arity == -1) {
    if (!n || *n < 1) arity(schema, "needs n >= 1");
    if (static_cast<int>(fills.size()) != *n) arity(schema, "needs exactly n fills");
  } else if (static_cast<int>(fills.size()) != info.arity) {
    arity(schema, "expects " + std::to_string(info.arity) + " fills");
  }
  if (static_cast<int>(agents.size()) != info.agent_slots)
    arity(schema, "expects " + std::to_string(info.agent_slots) + " agents");

  const std::string a = agents.empty() ? "" : agents.front();
  const F& p = fills.front();
  auto box = [](F f) { return F::box(f); };
  auto dia = [](F f) { return F::diamond(f); };
  auto stit = [&](F f) { return F::stit(a, f); };
  auto ags = [](F f) { return F::stit_ags(f); };
  auto knows = [&](F f) { return F::knows(a, f); };
  auto dual = [](const std::function<F(F)>& b) { return [b](F f) { return F::neg(b(F::neg(f))); }; };

  if (schema == "S5(box)") return s5(box, dia, p, fills[1]);
  if (schema == "S5([a])") return s5(stit, dual(stit), p, fills[1]);
  if (schema == "S5([Ags])") return s5(ags, dual(ags), p, fills[1]);
  if (schema == "S5(K)") return s5(knows, dual(knows), p, fills[1]);
  if (schema == "In1") return iff(F::yesterday(F::next(p)), p);
  if (schema == "In2") return iff(F::next(F::yesterday(p)), p);
  if (schema == "DET.S.X") return iff(F::next(p), F::neg(F::next(F::neg(p))));
  if (schema == "DET.S.Y") return iff(F::yesterday(p), F::neg(F::yesterday(F::neg(p))));
  if (schema == "SET") return F::implies(F::box(p), stit(p));
  if (schema == "NA") return F::implies(stit(F::next(p)), stit(F::next(F::box(p))));
  if (schema == "NAgs") return F::implies(ags(F::next(p)), ags(F::next(F::box(p))));
  if (schema == "GA") return F::implies(stit(p), ags(p));
  if (schema == "NoF") return F::implies(knows(F::next(p)), F::next(knows(p)));
  if (schema == "Unif-H") return F::implies(F::diamond(knows(p)), knows(F::diamond(p)));
  if (schema == "AgsPC_n") return counting(ags, fills);
  if (schema == "NX") return F::implies(F::box(F::next(p)), F::next(F::box(p)));
  if (schema == "NY") return F::implies(F::yesterday(F::box(p)), F::box(F::yesterday(p)));
  if (schema == "APC_n") return counting(stit, fills);
  throw Error("UnknownSchema", "unknown schema '" + schema + "'", {{"schema", schema}});
}

KripkeModel with_cell_atoms(const KripkeModel& m, const Partition& p, const std::string& prefix, int count) {
  KripkeModel out = m;
  for (int k = 0; k < count; ++k) out.valuation[prefix + std::to_string(k)] = std::vector<bool>(m.size(), false);
  for (int c = 0; c < m.box.class_count(); ++c) {
    std::map<int, WorldId> least;  // cell -> least member inside the class
    for (WorldId w : m.box.cell(c)) least.emplace(p.class_of(w), w);
    std::vector<std::pair<WorldId, int>> order;
    for (const auto& [cell, w] : least) order.emplace_back(w, cell);
    std::sort(order.begin(), order.end());
    for (int k = 0; k < count && k < static_cast<int>(order.size()); ++k)
      for (WorldId w : m.box.cell(c))
        if (p.class_of(w) == order[k].second) out.valuation[prefix + std::to_string(k)][w] = true;
  }
  return out;
}

namespace {

struct Runner {
  const FillPolicy& policy;
  SuiteReport report;
  std::mt19937_64 rng;

  explicit Runner(const FillPolicy& p) : policy(p), rng(p.seed) {}

  bool wanted(const std::string& s) const {
    return policy.schemata.empty() ||
           std::find(policy.schemata.begin(), policy.schemata.end(), s) != policy.schemata.end();
  }

  F fill(const KripkeModel& m) {
    FormulaParams fp;
    fp.seed = rng();
    fp.max_depth = policy.max_fill_depth;
    fp.agents = m.agents;
    for (const auto& [p, ext] : m.valuation)
      if (p.rfind("sat", 0) != 0 && p.rfind("nof", 0) != 0) fp.props.push_back(p);
    if (fp.props.empty()) fp.props = {"p"};
    fp.reach = {1, 1};
    return random_formula(fp);
  }

  std::string agent(const KripkeModel& m) { return m.agents[rng() % m.agents.size()]; }

  void check(int idx, const KripkeModel& m, const std::string& schema, const F& f) {
    ++report.instances;
    ++report.per_schema[schema];
    auto v = valid_on_model(m, f);
    if (!v.valid) {
      report.violations.push_back({idx, schema, print(f), *v.counterexample});
      return;
    }
    if (!policy.necessitation) return;
    // necessitation preserves validity on the model
    std::vector<F> nec = {F::box(f), F::next(f), F::yesterday(f), F::stit_ags(f)};
    for (const auto& a : m.agents) {
      nec.push_back(F::stit(a, f));
      nec.push_back(F::knows(a, f));
    }
    for (const auto& g : nec) {
      ++report.per_schema["Nec"];
      auto w = valid_on_model(m, g);
      if (!w.valid) report.violations.push_back({idx, "Nec", print(g), *w.counterexample});
    }
  }

  void counting_schema(int idx, const KripkeModel& m, int n, const std::string& schema, const std::string& a) {
    for (int i = 0; i < policy.fills_per_schema; ++i) {
      std::vector<F> fills;
      for (int k = 0; k < n; ++k) fills.push_back(fill(m));
      check(idx, m, schema, instantiate(schema, fills, a.empty() ? std::vector<std::string>{} : std::vector{a}, n));
    }
    if (!policy.saturating) return;
    const Partition& p = a.empty() ? m.choice_ags : m.choice[m.agent(a)];
    KripkeModel sat = with_cell_atoms(m, p, "sat", n);
    std::vector<F> fills;
    for (int k = 0; k < n; ++k) fills.push_back(F::atom("sat" + std::to_string(k)));
    check(idx, sat, schema, instantiate(schema, fills, a.empty() ? std::vector<std::string>{} : std::vector{a}, n));
  }

  void nof_saturating(int idx, const KripkeModel& m) {
    for (int a = 0; a < m.agent_count(); ++a) {
      KripkeModel sat = m;
      const Partition& ep = m.epistemic[a];
      for (int e = 0; e < ep.class_count(); ++e) {
        std::vector<bool> ext(m.size(), false);
        for (WorldId w : ep.cell(e))
          if (m.succ[w] != kNoWorld) ext[m.succ[w]] = true;
        sat.valuation["nof" + std::to_string(e)] = std::move(ext);
      }
      for (int e = 0; e < ep.class_count(); ++e)
        check(idx, sat, "NoF", instantiate("NoF", {F::atom("nof" + std::to_string(e))}, {m.agents[a]}));
    }
  }

  void run_model(int idx, const SuiteModel& sm, const std::vector<SchemaInfo>& schemata) {
    const KripkeModel& m = sm.model;
    for (const auto& s : schemata) {
      if (!wanted(s.name)) continue;
      if (s.name == "AgsPC_n") {
        counting_schema(idx, m, sm.n, s.name, "");
        continue;
      }
      if (s.name == "APC_n") {
        for (const auto& a : m.agents) counting_schema(idx, m, sm.n, s.name, a);
        continue;
      }
      if (s.name == "IA") {
        int most = std::min(3, m.agent_count());
        for (int k = 1; k <= most; ++k)
          for (int i = 0; i < policy.fills_per_schema; ++i) {
            std::vector<std::string> agents = m.agents;
            std::shuffle(agents.begin(), agents.end(), rng);
            agents.resize(k);
            std::vector<F> fills;
            for (int j = 0; j < k; ++j) fills.push_back(fill(m));
            check(idx, m, s.name, instantiate(s.name, fills, agents));
          }
        continue;
      }
      for (int i = 0; i < policy.fills_per_schema; ++i) {
        std::vector<F> fills;
        for (int j = 0; j < s.arity; ++j) fills.push_back(fill(m));
        std::vector<std::string> agents;
        for (int j = 0; j < s.agent_slots; ++j) agents.push_back(agent(m));
        check(idx, m, s.name, instantiate(s.name, fills, agents));
      }
      if (s.name == "NoF" && policy.saturating) nof_saturating(idx, m);
    }
  }

  SuiteReport run(const std::vector<SuiteModel>& models, const std::vector<SchemaInfo>& schemata) {
    for (std::size_t i = 0; i < models.size(); ++i) {
      if (policy.require_valid_frames) {
        auto r = validate_frame(models[i].model, AdditivityMode::Actual, models[i].n);
        if (!r.ok())
          throw Error("InvalidModelInSuite", "model " + std::to_string(i) + " fails " + r.failed().front(),
                      {{"model", std::to_string(i)}, {"condition", r.failed().front()}});
      }
      run_model(static_cast<int>(i), models[i], schemata);
    }
    report.models = static_cast<int>(models.size());
    return report;
  }
};

}  // namespace

SuiteReport soundness_suite(const std::vector<SuiteModel>& models, const FillPolicy& policy) {
  return Runner(policy).run(models, axiom_schemata());
}

SuiteReport derived_theorem_suite(const std::vector<SuiteModel>& models, const FillPolicy& policy) {
  return Runner(policy).run(models, derived_schemata());
}

SuiteConfig load_suite_config(const std::string& document, const std::string& base_dir) {
  SuiteConfig c;
  try {
    auto j = nlohmann::json::parse(document);
    if (!j.is_object()) throw Error("SchemaError", "suite configuration must be an object");
    if (j.contains("models")) {
      const auto& g = j.at("models");
      std::uint64_t seed = g.value("seed", std::uint64_t{0});
      int count = g.value("count", 0);
      for (int i = 0; i < count; ++i) {
        auto p = suite_params(seed, i);
        c.models.push_back({random_model(p), p.n_bound});
      }
    }
    if (j.contains("model_files"))
      for (const auto& e : j.at("model_files")) {
        std::filesystem::path path = e.at("path").get<std::string>();
        if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
        KripkeModel m = load_model_file(path.string());
        int n = e.contains("n") ? e.at("n").get<int>() : tight_bound(m);
        c.models.push_back({std::move(m), n});
      }
    c.derived = j.value("derived", false);
    c.policy.schemata = j.value("schemata", std::vector<std::string>{});
    for (const auto& s : c.policy.schemata) schema_info(s);
    if (j.contains("policy")) {
      const auto& p = j.at("policy");
      c.policy.max_fill_depth = p.value("max_fill_depth", c.policy.max_fill_depth);
      c.policy.fills_per_schema = p.value("fills_per_schema", c.policy.fills_per_schema);
      c.policy.seed = p.value("seed", c.policy.seed);
      c.policy.saturating = p.value("saturating", c.policy.saturating);
      c.policy.necessitation = p.value("necessitation", c.policy.necessitation);
      c.policy.require_valid_frames = p.value("require_valid_frames", c.policy.require_valid_frames);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("SchemaError", std::string("malformed suite configuration: ") + e.what());
  }
  if (c.models.empty()) throw Error("SchemaError", "suite configuration lists no models");
  return c;
}

std::string SuiteReport::to_json(const std::vector<SuiteModel>& ms) const {
  nlohmann::ordered_json j;
  j["models"] = models;
  j["instances"] = instances;
  j["ok"] = ok();
  j["per_schema"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : per_schema) j["per_schema"][k] = v;
  j["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : violations) {
    std::string world = v.model < static_cast<int>(ms.size()) && v.world != kNoWorld
                            ? ms[v.model].model.worlds[v.world]
                            : std::to_string(v.world);
    j["violations"].push_back({{"model", v.model}, {"schema", v.schema}, {"instance", v.instance}, {"world", world}});
  }
  return j.dump(2) + "\n";
}

}  // namespace kx
