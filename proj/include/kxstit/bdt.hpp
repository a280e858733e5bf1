#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kxstit/model.hpp"

namespace kx {

// (moment, history)
using Situation = std::pair<std::string, std::string>;

struct BDTScenario {
  std::vector<std::string> agents;
  std::vector<std::string> moments;
  std::map<std::string, std::string> parent;         // absent for the root
  std::map<std::string, std::string> history_names;  // leaf moment -> history id; default "h_<leaf>"
  // agent -> moment -> partition of the histories through that moment;
  // missing entries mean the agent has a single (vacuous) choice there
  std::map<std::string, std::map<std::string, std::vector<std::vector<std::string>>>> choice_at;
  // agent -> cells of situations; situations not listed are singletons
  std::map<std::string, std::vector<std::vector<Situation>>> epistemic_sit;
  std::map<std::string, std::set<Situation>> valuation_sit;

  struct History {
    std::string name;
    std::vector<std::string> moments;  // root first
  };
  // Maximal root-to-leaf paths ordered by history id. Throws
  // BDTInvariantViolation when the moments do not form a single tree.
  std::vector<History> histories() const;
};

// Checks the tree shape, no choice between undivided histories, independence
// of agency and the no-forget condition on situations. Throws
// BDTInvariantViolation naming the condition and witness histories.
void check_scenario(const BDTScenario& s);

// Situations become worlds "<moment>_<history>". Each history h also gets a
// stutter world pre_h before the root (no predecessor) and post_h after the
// leaf (its own successor). Pre-worlds form one box class with a single
// choice cell and copy the root layer's epistemic relation; post-worlds are
// isolated singletons. Stutter worlds copy the valuation of the situation
// they extend.
KripkeModel bdt_to_kripke(const BDTScenario& s);

// Bomb-squad example; case 'a' or 'b'.
BDTScenario figure1_scenario(char which);

std::string save_scenario(const BDTScenario& s);
BDTScenario load_scenario(const std::string& document);

}  // namespace kx
