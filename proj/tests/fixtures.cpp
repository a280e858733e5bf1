#include "fixtures.hpp"

namespace kxtest {

const char* one_world_doc() {
  return R"({
  "format_version": 1,
  "agents": ["a"],
  "worlds": ["w"],
  "r_box": [["w"]],
  "succ": {"w": "w"},
  "choice": {"a": [["w"]]},
  "epistemic": {"a": [["w"]]},
  "valuation": {"p": []}
})";
}

kx::KripkeModel one_world() { return kx::load_model(one_world_doc()); }

const kx::KripkeModel& figure1(char which) {
  static const kx::KripkeModel a = kx::bdt_to_kripke(kx::figure1_scenario('a'));
  static const kx::KripkeModel b = kx::bdt_to_kripke(kx::figure1_scenario('b'));
  return which == 'a' ? a : b;
}

const std::vector<Judgment>& figure1_judgments() {
  static const std::vector<Judgment> table = {
      {'a', "m2_h4", "~d_L & ~d_B", true},
      {'a', "m9_h4", "d", true},
      {'a', "m4_h9", "[Ags] X s", true},
      {'a', "m1_h2", "X(~d_L & ~d_B)", true},
      {'a', "m1_h10", "X [luther] X d_L", true},
      {'a', "m4_h11", "Y [Ags] X d", false},
      {'a', "m3_h7", "Y <> X [luther] X d_L", true},
      {'a', "m4_h10", "[luther] X d_L", true},
      {'a', "m4_h10", "[] ~K{luther} [luther] X d_L", true},
      {'a', "m4_h10", "[] K{luther} [] X Y f_B", false},
      {'b', "m4_h10", "K{luther} [luther] X d_L", true},
      {'b', "m4_h10", "[] K{luther} <> K{luther} [luther] X d_L", true},
      {'a', "m11_h6", "~K{luther} Y [benji] X d_B", true},
      {'a', "m4_h10", "X K{luther} Y [Ags] X (d_L | d_B)", true},
      {'a', "m4_h10", "X K{benji} Y [Ags] X (d_L | d_B)", true},
      {'b', "m4_h10", "~X K{benji} Y [Ags] X (Y [luther] X d_L)", true},
      {'a', "m4_h9", "~K{luther} (Y [ethan] X f_B)", true},
      {'a', "m4_h9", "~K{benji} (Y [ethan] X f_B)", true},
      {'a', "m4_h9", "X K{luther} Y [Ags] X (Y Y [ethan] X f_B)", true},
      {'a', "m4_h9", "X K{benji} Y [Ags] X (Y Y [ethan] X f_B)", true},
  };
  return table;
}

bool holds(const kx::KripkeModel& m, const std::string& world, const std::string& formula) {
  return kx::eval(m, world, kx::parse(formula));
}

}  // namespace kxtest

namespace kxtest {

kx::Formula random_surface_formula(std::mt19937_64& rng, int depth, const std::vector<std::string>& agents,
                                   const std::vector<std::string>& props) {
  using F = kx::Formula;
  if (depth <= 0 || rng() % 5 == 0) return F::atom(props[rng() % props.size()]);
  auto sub = [&] { return random_surface_formula(rng, depth - 1, agents, props); };
  const std::string& a = agents[rng() % agents.size()];
  switch (rng() % 17) {
    case 0: return F::neg(sub());
    case 1: { auto l = sub(); return F::conj(l, sub()); }
    case 2: { auto l = sub(); return F::disj(l, sub()); }
    case 3: { auto l = sub(); return F::implies(l, sub()); }
    case 4: return F::box(sub());
    case 5: return F::diamond(sub());
    case 6: return F::next(sub());
    case 7: return F::yesterday(sub());
    case 8: return F::stit(a, sub());
    case 9: return F::stit_ags(sub());
    case 10: return F::knows(a, sub());
    case 11: return F::common(sub());
    case 12: return F::ex_ante(a, sub());
    case 13: return F::ex_interim(a, sub());
    case 14: return F::ex_post(a, sub());
    case 15: return F::know_how(a, sub());
    default: return F::neg(F::conj(sub(), F::neg(sub())));
  }
}

kx::KripkeModel scramble_choices(const kx::KripkeModel& m, std::mt19937_64& rng) {
  kx::KripkeModel out = m;
  for (auto& choice : out.choice) {
    std::vector<int> label(m.size());
    for (int w = 0; w < m.size(); ++w) label[w] = m.box.class_of(w) * 4 + static_cast<int>(rng() % 3);
    choice = kx::Partition::from_labels(label);
  }
  out.choice_ags = kx::intersect_choices(out);
  return out;
}

}  // namespace kxtest
