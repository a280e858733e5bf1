#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kxstit/formula.hpp"
#include "kxstit/model.hpp"

namespace kx {

struct GenParams {
  std::uint64_t seed = 0;
  int agent_count = 1;
  int n_bound = 1;
  int box_class_count = 1;
  // lengths of the succ-cycles over box classes; empty means one cycle
  std::vector<int> cycle_structure;
  // 0 keeps the finest epistemic partitions, 1 merges aggressively
  double epistemic_coarseness = 0.5;
  std::vector<std::string> props = {"p", "q"};
  // box classes on one cycle share a size drawn from 1..max_class_size
  int max_class_size = 3;
};

// A frame-valid model in mode actual with bound p.n_bound. In a finite valid
// frame every Ags-cell fills its box class, so choices are vacuous; the
// variety lies in the temporal cycles, class sizes, knowledge and valuation.
// Throws UnsatisfiableParams.
KripkeModel random_model(const GenParams& p);

// Deterministic parameter grid used by the property suites.
GenParams suite_params(std::uint64_t seed, int index);

struct FormulaParams {
  std::uint64_t seed = 0;
  int max_depth = 3;
  std::vector<std::string> props = {"p", "q"};
  std::vector<std::string> agents = {"a"};
  DepthProfile reach = {1, 1};
  bool allow_ags = true;
};

// Primitive-base formula whose depth_profile stays within p.reach.
Formula random_formula(const FormulaParams& p);

GenParams load_gen_params(const std::string& document);
std::string save_gen_params(const GenParams& p);

}  // namespace kx
