#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kxstit/error.hpp"

namespace kx {

using WorldId = int;
inline constexpr WorldId kNoWorld = -1;

// A partition of 0..n-1 kept both as cells and as a class index per world.
class Partition {
 public:
  Partition() = default;
  // cells must cover 0..n-1 disjointly; throws PartitionError otherwise
  Partition(int n, std::vector<std::vector<WorldId>> cells, const std::string& what = "partition");
  static Partition discrete(int n);
  static Partition single(int n);
  // class index per world; class ids are renumbered by least member
  static Partition from_labels(const std::vector<int>& label);

  int size() const { return static_cast<int>(cls_.size()); }
  int class_count() const { return static_cast<int>(cells_.size()); }
  int class_of(WorldId w) const { return cls_[w]; }
  const std::vector<WorldId>& cell(int c) const { return cells_[c]; }
  const std::vector<WorldId>& cell_of(WorldId w) const { return cells_[cls_[w]]; }
  const std::vector<std::vector<WorldId>>& cells() const { return cells_; }
  bool same(WorldId a, WorldId b) const { return cls_[a] == cls_[b]; }
  // common refinement
  Partition meet(const Partition& other) const;
  bool refines(const Partition& coarser) const;

  friend bool operator==(const Partition& a, const Partition& b) { return a.cls_ == b.cls_; }

 private:
  std::vector<int> cls_;
  std::vector<std::vector<WorldId>> cells_;
};

struct KripkeModel {
  std::vector<std::string> agents;
  std::vector<std::string> worlds;
  Partition box;
  std::vector<WorldId> succ;  // kNoWorld only allowed in window models
  std::vector<Partition> choice;     // per agent, same order as agents
  Partition choice_ags;
  std::vector<Partition> epistemic;  // per agent
  std::map<std::string, std::vector<bool>> valuation;

  // derived by reindex()
  std::vector<std::vector<WorldId>> preds;
  std::map<std::string, WorldId> world_index;
  std::map<std::string, int> agent_index;

  int size() const { return static_cast<int>(worlds.size()); }
  int agent_count() const { return static_cast<int>(agents.size()); }
  WorldId world(const std::string& name) const;  // UnknownWorld
  int agent(const std::string& name) const;      // UnknownAgent
  bool holds(const std::string& prop, WorldId w) const;
  bool succ_total() const;
  void reindex();
};

// Builds choice_ags as the per-world intersection of the agents' cells
// (restricted to the box class).
Partition intersect_choices(const KripkeModel& m);

struct WindowModel {
  KripkeModel model;
  int horizon = 0;
  std::vector<bool> interior;
  std::vector<int> level;  // temporal offset from the root layer
};

// ---------------------------------------------------------------- documents

KripkeModel load_model(const std::string& document);
KripkeModel load_model_file(const std::string& path);
std::string save_model(const KripkeModel& m);  // canonical: sorted lists, 2-space indent
WindowModel load_window(const std::string& document);
std::string save_window(const WindowModel& w);

// ---------------------------------------------------------------- validation

enum class AdditivityMode { Actual, SuperAdditive };

struct ConditionCheck {
  std::string name;
  bool pass = true;
  std::vector<WorldId> witness;
  std::string explanation;
};

struct FrameReport {
  AdditivityMode mode = AdditivityMode::Actual;
  int n_bound = 1;
  std::vector<ConditionCheck> checks;  // sorted by name

  bool ok() const;
  const ConditionCheck& get(const std::string& name) const;
  std::vector<std::string> failed() const;
};

// Condition names in report order.
const std::vector<std::string>& condition_names();

FrameReport validate_frame(const KripkeModel& m, AdditivityMode mode, int n);
// Universally quantified worlds range over the interior, existential
// witnesses over the whole window.
FrameReport validate_frame(const KripkeModel& m, AdditivityMode mode, int n,
                           const std::vector<bool>& interior);
FrameReport validate_window(const WindowModel& w, AdditivityMode mode, int n);

std::string report_json(const FrameReport& r, const KripkeModel& m);
std::string mode_name(AdditivityMode mode);
AdditivityMode parse_mode(const std::string& s);

// Smallest n making m an n-frame (at least 1).
int tight_bound(const KripkeModel& m);

}  // namespace kx
