#include "kxstit/model.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace kx {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------- Partition

Partition::Partition(int n, std::vector<std::vector<WorldId>> cells, const std::string& what) {
  cls_.assign(n, -1);
  for (auto& c : cells) {
    if (c.empty()) throw Error("PartitionError", what + ": empty cell", {{"relation", what}});
    std::sort(c.begin(), c.end());
  }
  std::sort(cells.begin(), cells.end());
  for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
    for (WorldId w : cells[i]) {
      if (w < 0 || w >= n) throw Error("PartitionError", what + ": world out of range", {{"relation", what}});
      if (cls_[w] != -1)
        throw Error("PartitionError", what + ": world " + std::to_string(w) + " in two cells",
                    {{"relation", what}, {"world", std::to_string(w)}});
      cls_[w] = i;
    }
  }
  for (int w = 0; w < n; ++w)
    if (cls_[w] == -1)
      throw Error("PartitionError", what + ": world " + std::to_string(w) + " not covered",
                  {{"relation", what}, {"world", std::to_string(w)}});
  cells_ = std::move(cells);
}

Partition Partition::discrete(int n) {
  std::vector<int> label(n);
  for (int i = 0; i < n; ++i) label[i] = i;
  return from_labels(label);
}

Partition Partition::single(int n) { return from_labels(std::vector<int>(n, 0)); }

Partition Partition::from_labels(const std::vector<int>& label) {
  Partition p;
  int n = static_cast<int>(label.size());
  p.cls_.assign(n, -1);
  std::map<int, int> renum;
  for (int w = 0; w < n; ++w) {
    auto [it, fresh] = renum.emplace(label[w], static_cast<int>(p.cells_.size()));
    if (fresh) p.cells_.emplace_back();
    p.cells_[it->second].push_back(w);
    p.cls_[w] = it->second;
  }
  return p;
}

Partition Partition::meet(const Partition& other) const {
  std::map<std::pair<int, int>, int> ids;
  std::vector<int> label(cls_.size());
  for (std::size_t w = 0; w < cls_.size(); ++w) {
    auto key = std::make_pair(cls_[w], other.cls_[w]);
    auto it = ids.emplace(key, static_cast<int>(ids.size())).first;
    label[w] = it->second;
  }
  return from_labels(label);
}

bool Partition::refines(const Partition& coarser) const {
  for (const auto& c : cells_)
    for (WorldId w : c)
      if (!coarser.same(c.front(), w)) return false;
  return true;
}

// ---------------------------------------------------------------- KripkeModel

WorldId KripkeModel::world(const std::string& name) const {
  auto it = world_index.find(name);
  if (it == world_index.end())
    throw Error("UnknownWorld", "unknown world '" + name + "'", {{"world", name}});
  return it->second;
}

int KripkeModel::agent(const std::string& name) const {
  auto it = agent_index.find(name);
  if (it == agent_index.end())
    throw Error("UnknownAgent", "unknown agent '" + name + "'", {{"agent", name}});
  return it->second;
}

bool KripkeModel::holds(const std::string& prop, WorldId w) const {
  auto it = valuation.find(prop);
  return it != valuation.end() && it->second[w];
}

bool KripkeModel::succ_total() const {
  return std::none_of(succ.begin(), succ.end(), [](WorldId v) { return v == kNoWorld; });
}

void KripkeModel::reindex() {
  int n = size();
  world_index.clear();
  for (int w = 0; w < n; ++w) world_index[worlds[w]] = w;
  agent_index.clear();
  for (int a = 0; a < agent_count(); ++a) agent_index[agents[a]] = a;
  preds.assign(n, {});
  for (int w = 0; w < n; ++w)
    if (succ[w] != kNoWorld) preds[succ[w]].push_back(w);
  for (auto& [p, v] : valuation) v.resize(n, false);
}

Partition intersect_choices(const KripkeModel& m) {
  Partition p = m.box;
  for (const auto& c : m.choice) p = p.meet(c);
  return p;
}

// ---------------------------------------------------------------- documents

namespace {

[[noreturn]] void schema(const std::string& msg, const std::string& field = "") {
  std::map<std::string, std::string> d;
  if (!field.empty()) d["field"] = field;
  throw Error("SchemaError", msg, d);
}

const json& field(const json& doc, const char* key) {
  if (!doc.contains(key)) schema(std::string("missing field '") + key + "'", key);
  return doc.at(key);
}

bool valid_token(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::vector<std::string> string_list(const json& j, const std::string& what) {
  if (!j.is_array()) schema(what + " must be a list", what);
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) schema(what + " entries must be strings", what);
    out.push_back(e.get<std::string>());
  }
  return out;
}

WorldId ref(const std::map<std::string, WorldId>& index, const std::string& name, const std::string& what) {
  auto it = index.find(name);
  if (it == index.end()) schema(what + " refers to unknown world '" + name + "'", what);
  return it->second;
}

Partition partition_of(const json& j, const std::map<std::string, WorldId>& index, int n, const std::string& what) {
  if (!j.is_array()) schema(what + " must be a list of cells", what);
  std::vector<std::vector<WorldId>> cells;
  for (const auto& c : j) {
    std::vector<WorldId> cell;
    for (const auto& name : string_list(c, what)) cell.push_back(ref(index, name, what));
    cells.push_back(std::move(cell));
  }
  return Partition(n, std::move(cells), what);
}

KripkeModel model_from_json(const json& doc, bool allow_partial_succ) {
  if (!doc.is_object()) schema("model document must be an object");
  const json& ver = field(doc, "format_version");
  if (!ver.is_number_integer() || ver.get<int>() != 1) schema("unsupported format_version", "format_version");

  KripkeModel m;
  m.agents = string_list(field(doc, "agents"), "agents");
  m.worlds = string_list(field(doc, "worlds"), "worlds");
  for (const auto& a : m.agents)
    if (!valid_token(a) || a == "Ags") schema("invalid agent name '" + a + "'", "agents");
  if (std::set<std::string>(m.agents.begin(), m.agents.end()).size() != m.agents.size())
    schema("duplicate agent", "agents");
  if (m.worlds.empty()) schema("model needs at least one world", "worlds");
  std::map<std::string, WorldId> index;
  for (int w = 0; w < static_cast<int>(m.worlds.size()); ++w)
    if (!index.emplace(m.worlds[w], w).second) schema("duplicate world '" + m.worlds[w] + "'", "worlds");
  int n = m.size();

  m.box = partition_of(field(doc, "r_box"), index, n, "r_box");

  const json& succ = field(doc, "succ");
  if (!succ.is_object()) schema("succ must be a map", "succ");
  m.succ.assign(n, kNoWorld);
  for (auto it = succ.begin(); it != succ.end(); ++it) {
    if (!it.value().is_string()) schema("succ targets must be world ids", "succ");
    m.succ[ref(index, it.key(), "succ")] = ref(index, it.value().get<std::string>(), "succ");
  }
  if (!allow_partial_succ)
    for (int w = 0; w < n; ++w)
      if (m.succ[w] == kNoWorld)
        throw Error("SuccNotTotal", "succ undefined at world '" + m.worlds[w] + "'", {{"world", m.worlds[w]}});

  auto per_agent = [&](const char* key) {
    const json& j = field(doc, key);
    if (!j.is_object()) schema(std::string(key) + " must be a map from agents to partitions", key);
    std::vector<Partition> out;
    for (const auto& a : m.agents) {
      if (!j.contains(a)) schema(std::string(key) + " missing agent '" + a + "'", key);
      out.push_back(partition_of(j.at(a), index, n, std::string(key) + "[" + a + "]"));
    }
    for (auto it = j.begin(); it != j.end(); ++it)
      if (std::find(m.agents.begin(), m.agents.end(), it.key()) == m.agents.end())
        schema(std::string(key) + " names unknown agent '" + it.key() + "'", key);
    return out;
  };
  m.choice = per_agent("choice");
  m.epistemic = per_agent("epistemic");
  m.reindex();
  m.choice_ags = doc.contains("choice_ags") ? partition_of(doc.at("choice_ags"), index, n, "choice_ags")
                                           : intersect_choices(m);

  const json& val = field(doc, "valuation");
  if (!val.is_object()) schema("valuation must be a map", "valuation");
  for (auto it = val.begin(); it != val.end(); ++it) {
    if (!valid_token(it.key())) schema("invalid proposition '" + it.key() + "'", "valuation");
    std::vector<bool> ext(n, false);
    for (const auto& name : string_list(it.value(), "valuation")) ext[ref(index, name, "valuation")] = true;
    m.valuation[it.key()] = std::move(ext);
  }
  m.reindex();
  return m;
}

json partition_json(const Partition& p, const KripkeModel& m) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& c : p.cells()) {
    std::vector<std::string> names;
    for (WorldId w : c) names.push_back(m.worlds[w]);
    std::sort(names.begin(), names.end());
    cells.push_back(std::move(names));
  }
  std::sort(cells.begin(), cells.end());
  return cells;
}

json model_to_json(const KripkeModel& m) {
  json doc;
  doc["format_version"] = 1;
  std::vector<std::string> agents = m.agents, worlds = m.worlds;
  std::sort(agents.begin(), agents.end());
  std::sort(worlds.begin(), worlds.end());
  doc["agents"] = agents;
  doc["worlds"] = worlds;
  doc["r_box"] = partition_json(m.box, m);
  std::map<std::string, std::string> succ;
  for (int w = 0; w < m.size(); ++w)
    if (m.succ[w] != kNoWorld) succ[m.worlds[w]] = m.worlds[m.succ[w]];
  json js = json::object();
  for (const auto& [k, v] : succ) js[k] = v;
  doc["succ"] = js;
  auto per_agent = [&](const std::vector<Partition>& ps) {
    json j = json::object();
    for (const auto& a : agents) j[a] = partition_json(ps[m.agent(a)], m);
    return j;
  };
  doc["choice"] = per_agent(m.choice);
  doc["choice_ags"] = partition_json(m.choice_ags, m);
  doc["epistemic"] = per_agent(m.epistemic);
  json val = json::object();
  for (const auto& [p, ext] : m.valuation) {
    std::vector<std::string> names;
    for (int w = 0; w < m.size(); ++w)
      if (ext[w]) names.push_back(m.worlds[w]);
    std::sort(names.begin(), names.end());
    val[p] = names;
  }
  doc["valuation"] = val;
  return doc;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error("SchemaError", std::string("malformed document: ") + e.what());
  }
}

}  // namespace

KripkeModel load_model(const std::string& document) {
  try {
    return model_from_json(parse_json(document), false);
  } catch (const json::exception& e) {
    throw Error("SchemaError", std::string("malformed model: ") + e.what());
  }
}

KripkeModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("IOError", "cannot read '" + path + "'", {{"path", path}});
  std::stringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str());
}

std::string save_model(const KripkeModel& m) { return model_to_json(m).dump(2) + "\n"; }

WindowModel load_window(const std::string& document) {
  try {
    json doc = parse_json(document);
    WindowModel w;
    w.model = model_from_json(doc, true);
    const json& h = field(doc, "horizon");
    if (!h.is_number_integer() || h.get<int>() < 1) schema("horizon must be a positive integer", "horizon");
    w.horizon = h.get<int>();
    w.interior.assign(w.model.size(), false);
    for (const auto& name : string_list(field(doc, "interior"), "interior"))
      w.interior[ref(w.model.world_index, name, "interior")] = true;
    w.level.assign(w.model.size(), 0);
    if (doc.contains("level")) {
      for (auto it = doc["level"].begin(); it != doc["level"].end(); ++it)
        w.level[ref(w.model.world_index, it.key(), "level")] = it.value().get<int>();
    }
    for (int v = 0; v < w.model.size(); ++v)
      if (w.interior[v] && w.model.succ[v] == kNoWorld)
        throw Error("SuccNotTotal", "succ undefined at interior world '" + w.model.worlds[v] + "'",
                    {{"world", w.model.worlds[v]}});
    return w;
  } catch (const json::exception& e) {
    throw Error("SchemaError", std::string("malformed window: ") + e.what());
  }
}

std::string save_window(const WindowModel& w) {
  json doc = model_to_json(w.model);
  doc["horizon"] = w.horizon;
  std::vector<std::string> interior;
  std::map<std::string, int> level;
  for (int v = 0; v < w.model.size(); ++v) {
    if (w.interior[v]) interior.push_back(w.model.worlds[v]);
    level[w.model.worlds[v]] = w.level[v];
  }
  std::sort(interior.begin(), interior.end());
  doc["interior"] = interior;
  json jl = json::object();
  for (const auto& [k, v] : level) jl[k] = v;
  doc["level"] = jl;
  return doc.dump(2) + "\n";
}

}  // namespace kx
