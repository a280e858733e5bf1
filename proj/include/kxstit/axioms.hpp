#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kxstit/formula.hpp"
#include "kxstit/model.hpp"

namespace kx {

struct SchemaInfo {
  std::string name;
  int arity;        // formula slots; -1 when it equals n (AgsPC_n, APC_n) or m (IA)
  int agent_slots;  // -1 for IA (m agents)
  bool derived;
};

// Schema names: S5(box) S5([a]) S5([Ags]) S5(K) In1 In2 DET.S.X DET.S.Y SET
// NA NAgs GA IA NoF Unif-H AgsPC_n, and the derived NX NY APC_n.
const std::vector<SchemaInfo>& axiom_schemata();
const std::vector<SchemaInfo>& derived_schemata();
const SchemaInfo& schema_info(const std::string& name);  // UnknownSchema

// n is required for AgsPC_n / APC_n and must equal fills.size(); IA takes one
// fill per agent. Throws ArityMismatch, DuplicateAgents, UnknownSchema.
Formula instantiate(const std::string& schema, const std::vector<Formula>& fills,
                    const std::vector<std::string>& agents = {}, std::optional<int> n = std::nullopt);

struct SuiteModel {
  KripkeModel model;
  int n = 1;
};

struct FillPolicy {
  int max_fill_depth = 2;
  int fills_per_schema = 10;
  std::uint64_t seed = 0;
  bool saturating = true;   // add the saturating fills for the counting schemata
  bool necessitation = true;  // spot-check rules on every valid instance
  bool require_valid_frames = true;  // reject invalid models up front
  std::vector<std::string> schemata;  // empty means all
};

struct Violation {
  int model = 0;
  std::string schema;
  std::string instance;  // printed formula
  WorldId world = kNoWorld;
};

struct SuiteReport {
  int models = 0;
  int instances = 0;
  std::map<std::string, int> per_schema;  // instances checked
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_json(const std::vector<SuiteModel>& models) const;
};

// Throws InvalidModelInSuite when require_valid_frames is set and a model
// fails validate_frame(actual, n).
SuiteReport soundness_suite(const std::vector<SuiteModel>& models, const FillPolicy& policy);
SuiteReport derived_theorem_suite(const std::vector<SuiteModel>& models, const FillPolicy& policy);

// Suite configuration document:
// {"models": {"seed": 1, "count": 200}, "model_files": [{"path": "m.model", "n": 2}],
//  "derived": false, "schemata": [...],
//  "policy": {"max_fill_depth": 2, "fills_per_schema": 10, "seed": 0, "saturating": true,
//             "necessitation": true, "require_valid_frames": true}}
// Relative paths resolve against base_dir. Throws SchemaError.
struct SuiteConfig {
  std::vector<SuiteModel> models;
  bool derived = false;
  FillPolicy policy;
};
SuiteConfig load_suite_config(const std::string& document, const std::string& base_dir = ".");

// Copy of m with atoms "<prefix><k>" true on the k-th cell (ordered by least
// world) of the given partition inside every box class, for k < count.
KripkeModel with_cell_atoms(const KripkeModel& m, const Partition& p, const std::string& prefix, int count);

}  // namespace kx
