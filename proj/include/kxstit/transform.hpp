#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kxstit/formula.hpp"
#include "kxstit/model.hpp"

namespace kx {

// Unraveling into world sequences. Flag 1 sequences ascend along succ, flag 0
// sequences descend along predecessors; a sequence of length m+1 sits at level
// m (flag 1) or -m (flag 0). The window keeps |level| <= horizon, restricted to
// the connected part of <root,1>; interior worlds have |level| < horizon.
struct Unraveled {
  WindowModel window;
  std::vector<WorldId> projection;  // last element of each sequence
  std::vector<std::vector<WorldId>> sequence;
  std::vector<int> flag;
};

// Throws HorizonTooSmall (horizon < 1), UnknownWorld, and InvalidModel when m
// fails EQ, SET or super-additivity.
Unraveled unravel(const KripkeModel& m, WorldId root, int horizon);
Unraveled unravel(const KripkeModel& m, const std::string& root, int horizon);

struct MorphismFailure {
  std::string relation;  // box X Y K:<agent> choice:<agent> choice:Ags, or atoms
  std::string kind;      // forth, back, atoms
  WorldId source = kNoWorld;
  WorldId other = kNoWorld;  // source world (forth) or target world (back)
  std::string detail;
};

struct RelationVerdict {
  std::string relation;
  bool forth = true;
  bool back = true;
};

struct MorphismReport {
  int checked = 0;  // source worlds checked
  bool surjective = true;
  std::vector<WorldId> missed;  // target worlds outside the image
  bool atoms = true;
  std::vector<RelationVerdict> relations;
  std::vector<MorphismFailure> failures;
  bool ok() const;
  std::string to_json(const KripkeModel& source, const KripkeModel& target) const;
};

// checked selects the source worlds quantified universally; existential
// witnesses range over every source world. Surjectivity is measured against
// the part of the target connected to the image of the checked worlds.
// Throws PartialMap when f is undefined on a checked world.
MorphismReport check_bounded_morphism(const std::vector<WorldId>& f, const KripkeModel& source,
                                      const std::vector<bool>& checked, const KripkeModel& target);
MorphismReport check_bounded_morphism(const std::vector<WorldId>& f, const WindowModel& source,
                                      const KripkeModel& target, bool interior_only = true);
MorphismReport check_bounded_morphism(const std::vector<WorldId>& f, const KripkeModel& source,
                                      const KripkeModel& target);

enum class Truth { False, True, Unknown };

// Kleene evaluation on a window: X without a successor and Y at a boundary
// world are Unknown, and Unknown propagates through the modalities.
std::vector<Truth> extension3(const WindowModel& w, const Formula& f);

// A Kripke model seen as a window with every world interior.
WindowModel as_window(const KripkeModel& m);

struct PreservationMismatch {
  WorldId world = kNoWorld;
  std::string formula;
  bool source_value = false;
  bool target_value = false;
};

struct PreservationReport {
  int checked = 0;       // pairs with a definite value on both sides
  int undetermined = 0;  // pairs whose evaluation reached the window edge
  // DepthExceedsWindow: pairs skipped because the reach does not fit the window
  std::vector<std::pair<std::string, WorldId>> skipped;
  std::vector<PreservationMismatch> mismatches;
  bool ok() const { return mismatches.empty(); }
  std::string to_json(const KripkeModel& source) const;
};

// Compares truth at every interior source world u with truth at f(u). A pair
// is skipped when the formula's reach exceeds horizon - |level(u)|.
PreservationReport truth_preservation(const WindowModel& source, const WindowModel& target,
                                      const std::vector<WorldId>& f, const std::vector<Formula>& formulas);
PreservationReport truth_preservation(const WindowModel& source, const KripkeModel& target,
                                      const std::vector<WorldId>& f, const std::vector<Formula>& formulas);

struct ChoiceProfile {
  std::vector<int> cells;         // per agent: class id in m.choice[agent]
  std::vector<WorldId> members;   // intersection of the cells
  std::vector<int> ags_cells;     // class ids in m.choice_ags inside the intersection
  std::vector<int> enumeration;   // ags_cells padded to length n with the last entry
};

struct ChoiceProfileTable {
  int box_class = 0;
  int n = 1;
  std::vector<ChoiceProfile> profiles;  // ordered by least member
  int profile_of(WorldId w) const;      // -1 outside the class
};

// Profiles with non-empty intersection inside one box class. n defaults to
// tight_bound(m); throws InvalidBound when some profile holds more than n
// Ags-cells.
ChoiceProfileTable choice_profiles(const KripkeModel& m, int box_class, std::optional<int> n = std::nullopt);

struct Actualized {
  WindowModel window;
  std::vector<WorldId> projection;  // matrix world -> source world
  int n = 1;
  // per matrix world: the source history through its base world and the index
  // vector (one entry per agent) at each position of that history
  std::vector<std::vector<WorldId>> history;
  std::vector<std::vector<std::vector<int>>> index_fn;
  std::vector<int> position;  // position of the base world in its history
};

// Matrix construction over a window with linear histories. n defaults to
// tight_bound(source.model). Throws WindowTooSmall (horizon < 1),
// SourceNotIrreflexive (a history revisits a world), InvalidModel (branching
// histories) and MatrixTooLarge (more than max_worlds worlds).
Actualized actualize(const WindowModel& source, std::optional<int> n = std::nullopt,
                     std::size_t max_worlds = 200000);

// Two agents a, b over two five-step histories; the middle box class has one
// choice profile split into two Ags-cells, so additivity holds only in the
// super-additive sense. Horizon 2, levels -2..2.
WindowModel super_additive_example();

// [[source, target], ...] by world name
std::string projection_json(const std::vector<WorldId>& f, const KripkeModel& source, const KripkeModel& target);

}  // namespace kx
