#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kxstit/formula.hpp"
#include "kxstit/model.hpp"

namespace kx {

// Top-down evaluation. Sugar is evaluated directly and macros are expanded on
// the fly. Y quantifies over all R_X-predecessors, so eval stays total on
// models whose succ is not injective.
bool eval(const KripkeModel& m, WorldId w, const Formula& f);
bool eval(const KripkeModel& m, const std::string& world, const Formula& f);

// Bottom-up evaluation over the subformulas of normalize(f).
std::vector<bool> extension(const KripkeModel& m, const Formula& f);

struct Validity {
  bool valid = true;
  std::optional<WorldId> counterexample;  // least failing world
};
Validity valid_on_model(const KripkeModel& m, const Formula& f);

// Worlds reachable through the union of all agents' epistemic relations.
Partition common_knowledge_classes(const KripkeModel& m);

struct KnowledgeReport {
  std::string agent;
  Formula target;
  WorldId world = kNoWorld;
  bool ex_ante = false;
  bool ex_interim = false;
  bool ex_post = false;
  bool know_how = false;
  bool does = false;
  bool knowingly_does = false;
  bool in_fragment = true;  // target uses stit only in the [a]X / [Ags]X form
  std::vector<std::string> warnings;
  // flag name -> printed expansion that was evaluated
  std::vector<std::pair<std::string, std::string>> expanded;
};

// Set check_frame to false to skip the frame-validity warning.
KnowledgeReport knowledge_report(const KripkeModel& m, WorldId w, const std::string& agent, const Formula& phi,
                                 bool check_frame = true);
std::string knowledge_report_json(const KnowledgeReport& r, const KripkeModel& m);

struct RefinementFailure {
  std::string agent;
  Formula formula;
  std::string implication;  // "ex_ante->ex_interim" or "ex_interim->ex_post"
  WorldId world = kNoWorld;
};

struct RefinementReport {
  int checked = 0;
  std::vector<RefinementFailure> failures;
  bool ok() const { return failures.empty(); }
};

RefinementReport check_refinement(const KripkeModel& m, const std::vector<std::string>& agents,
                                  const std::vector<Formula>& formulas);

}  // namespace kx
