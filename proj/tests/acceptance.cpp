// One line per acceptance criterion. Exits 0 iff the set of failing criteria
// equals the set given by --expect-fail.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "fixtures.hpp"
#include "kxstit/axioms.hpp"
#include "kxstit/gen.hpp"
#include "kxstit/transform.hpp"

using kx::Formula;
using kx::parse;
using kx::WorldId;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::vector<kx::SuiteModel> generated(int count, std::uint64_t seed) {
  std::vector<kx::SuiteModel> out;
  for (int i = 0; i < count; ++i) {
    auto p = kx::suite_params(seed, i);
    out.push_back({kx::random_model(p), p.n_bound});
  }
  return out;
}

std::vector<std::string> props_of(const kx::KripkeModel& m) {
  std::vector<std::string> out;
  for (const auto& kv : m.valuation) out.push_back(kv.first);
  return out;
}

Formula iff(const Formula& l, const Formula& r) {
  return Formula::conj(Formula::implies(l, r), Formula::implies(r, l));
}

Outcome figure1_regression() {
  auto start = std::chrono::steady_clock::now();
  kx::KripkeModel a = kx::bdt_to_kripke(kx::figure1_scenario('a'));
  kx::KripkeModel b = kx::bdt_to_kripke(kx::figure1_scenario('b'));
  int wrong = 0;
  std::string first;
  const auto& judgments = kxtest::figure1_judgments();
  for (const auto& j : judgments) {
    bool v = kx::eval(j.which == 'a' ? a : b, j.world, parse(j.formula));
    if (v != j.expected) {
      if (!wrong) first = std::string(1, j.which) + " " + j.world + " " + j.formula;
      ++wrong;
    }
  }
  double t = seconds_since(start);
  std::ostringstream os;
  os << judgments.size() << " judgments, " << wrong << " wrong, " << t << " s";
  if (wrong) os << ", first: " << first;
  return {wrong == 0 && t < 1.0, os.str()};
}

Outcome soundness() {
  auto start = std::chrono::steady_clock::now();
  kx::FillPolicy policy;
  policy.seed = 9;
  auto r = kx::soundness_suite(generated(200, 2), policy);
  int thin = 0;
  for (const auto& s : kx::axiom_schemata())
    if (r.per_schema[s.name] < 200 * 10) ++thin;
  double t = seconds_since(start);
  std::ostringstream os;
  os << r.models << " models, " << r.per_schema.size() << " schemata, " << r.instances << " instances, "
     << r.violations.size() << " counterexamples, " << thin << " schemata under 10 per model, " << t << " s";
  if (!r.ok()) os << ", first: " << r.violations.front().schema << " " << r.violations.front().instance;
  return {r.ok() && thin == 0 && t < 60.0, os.str()};
}

Outcome derived_theorems() {
  kx::FillPolicy policy;
  policy.seed = 9;
  auto r = kx::derived_theorem_suite(generated(200, 2), policy);
  std::ostringstream os;
  os << r.models << " models, " << r.instances << " instances, " << r.violations.size() << " counterexamples";
  if (!r.ok()) os << ", first: " << r.violations.front().schema << " " << r.violations.front().instance;
  return {r.ok(), os.str()};
}

Outcome refinement() {
  std::mt19937_64 rng(4);
  int checked = 0, failures = 0;
  auto run = [&](const kx::KripkeModel& m) {
    std::vector<Formula> phis;
    auto props = props_of(m);
    for (int k = 0; k < 20; ++k) phis.push_back(kxtest::random_surface_formula(rng, 2, m.agents, props));
    auto r = kx::check_refinement(m, m.agents, phis);
    checked += r.checked;
    failures += static_cast<int>(r.failures.size());
  };
  for (int i = 0; i < 200; ++i) run(kx::random_model(kx::suite_params(2, i)));
  for (char c : {'a', 'b'}) run(kxtest::figure1(c));
  std::ostringstream os;
  os << "202 models, " << checked << " checks, " << failures << " counterexamples";
  return {failures == 0 && checked > 0, os.str()};
}

Outcome knowledge_equivalences() {
  std::mt19937_64 rng(10);
  int checked = 0, failures = 0;
  for (int i = 0; i < 200; ++i) {
    auto m = kx::random_model(kx::suite_params(2, i));
    for (int k = 0; k < 5; ++k) {
      kx::FormulaParams fp;
      fp.seed = rng();
      fp.max_depth = 2;
      fp.agents = m.agents;
      auto phi = kx::random_formula(fp);
      const auto& a = m.agents[rng() % m.agents.size()];
      const auto& b = m.agents[rng() % m.agents.size()];
      auto doing = Formula::stit(a, Formula::next(phi));
      std::vector<Formula> claims = {
          iff(Formula::box(Formula::knows(a, Formula::box(Formula::next(phi)))),
              Formula::box(Formula::knows(a, Formula::next(phi)))),
          iff(Formula::box(Formula::knows(a, Formula::diamond(Formula::knows(a, doing)))),
              Formula::diamond(Formula::knows(a, doing))),
          Formula::implies(
              Formula::knows(a, Formula::stit(a, Formula::next(Formula::yesterday(Formula::stit(b, Formula::next(phi)))))),
              Formula::box(Formula::next(phi)))};
      for (const auto& c : claims) {
        ++checked;
        if (!kx::valid_on_model(m, c).valid) ++failures;
      }
    }
  }
  std::ostringstream os;
  os << checked << " validity checks on 200 models, " << failures << " counterexamples";
  return {failures == 0, os.str()};
}

// X K_a Y [Ags] X Y [a] X phi -> K_a [a] X phi
Formula ex_post_to_interim(const std::string& a, const Formula& phi) {
  auto lhs = Formula::next(Formula::knows(
      a, Formula::yesterday(Formula::stit_ags(Formula::next(Formula::yesterday(Formula::stit(a, Formula::next(phi))))))));
  return Formula::implies(lhs, Formula::knows(a, Formula::stit(a, Formula::next(phi))));
}

Outcome non_validity_witness() {
  // phi is a fresh atom and every valuation of it is tried, which covers every
  // formula on the model
  int models = 0, valuations = 0;
  std::string found;
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 40 && found.empty(); ++seed) {
    for (int i = 0; i < 200 && found.empty(); ++i) {
      kx::GenParams p = kx::suite_params(seed, i);
      p.max_class_size = 1 + static_cast<int>((seed + i) % 3);
      p.box_class_count = 1 + static_cast<int>(i % 3);
      p.cycle_structure.clear();
      p.epistemic_coarseness = (i % 5) / 4.0;
      kx::KripkeModel m;
      try {
        m = kx::random_model(p);
      } catch (const kx::Error&) {
        continue;
      }
      if (m.size() > 6) continue;
      if (!kx::validate_frame(m, kx::AdditivityMode::Actual, p.n_bound).ok()) continue;
      if (!seen.insert(kx::save_model(m)).second) continue;
      ++models;
      for (unsigned mask = 0; mask < (1u << m.size()) && found.empty(); ++mask) {
        ++valuations;
        m.valuation["phi"].assign(m.size(), false);
        for (WorldId w = 0; w < m.size(); ++w) m.valuation["phi"][w] = (mask >> w) & 1u;
        for (const auto& a : m.agents) {
          auto v = kx::valid_on_model(m, ex_post_to_interim(a, parse("phi")));
          if (!v.valid) {
            found = "seed " + std::to_string(seed) + " index " + std::to_string(i) + " at " +
                    m.worlds[*v.counterexample];
            break;
          }
        }
      }
    }
  }
  // the bomb-defusal case-a model falsifies the formula, but it is not a
  // valid frame
  const auto& fig = kxtest::figure1('a');
  bool fig_falsifies = !kx::eval(fig, "m4_h9", ex_post_to_interim("luther", parse("~d_L")));
  auto fig_rep = kx::validate_frame(fig, kx::AdditivityMode::Actual, kx::tight_bound(fig));
  std::string fig_failed;
  for (const auto& c : fig_rep.failed()) fig_failed += (fig_failed.empty() ? "" : ",") + c;

  std::ostringstream os;
  os << models << " distinct valid models with at most 6 worlds, " << valuations << " valuations of phi, ";
  if (found.empty())
    os << "no valid witness found";
  else
    os << "witness " << found;
  os << "; bomb-squad case a at m4_h9 with phi = ~d_L: " << (fig_falsifies ? "falsified" : "holds")
     << ", frame " << (fig_rep.ok() ? "valid" : "invalid (" + fig_failed + ")");
  return {!found.empty(), os.str()};
}

std::vector<Formula> reach_one_formulas(std::mt19937_64& rng, const kx::KripkeModel& m, int count) {
  std::vector<Formula> out;
  for (int i = 0; i < count; ++i) {
    kx::FormulaParams fp;
    fp.seed = rng();
    fp.max_depth = 3;
    fp.props = props_of(m);
    fp.agents = m.agents;
    out.push_back(kx::random_formula(fp));
  }
  return out;
}

Outcome transformations() {
  auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(3);
  int invalid = 0, morphism = 0, mismatches = 0, checked = 0;
  for (int i = 0; i < 50; ++i) {
    auto p = kx::suite_params(21, i);
    auto m = kx::random_model(p);
    auto u = kx::unravel(m, static_cast<WorldId>(i % m.size()), 2);
    if (!kx::validate_window(u.window, kx::AdditivityMode::Actual, p.n_bound).ok()) ++invalid;
    if (!kx::check_bounded_morphism(u.projection, u.window, m).ok()) ++morphism;
    auto tp = kx::truth_preservation(u.window, m, u.projection, reach_one_formulas(rng, m, 10));
    mismatches += static_cast<int>(tp.mismatches.size());
    checked += tp.checked;
  }
  auto sa = kx::super_additive_example();
  bool source_super = !kx::validate_window(sa, kx::AdditivityMode::Actual, 2).get("Additivity").pass &&
                      kx::validate_window(sa, kx::AdditivityMode::SuperAdditive, 2).ok();
  auto act = kx::actualize(sa);
  bool additive = kx::validate_window(act.window, kx::AdditivityMode::Actual, 4).get("Additivity").pass;
  bool act_morphism = kx::check_bounded_morphism(act.projection, act.window, sa.model).ok();
  auto tp = kx::truth_preservation(act.window, sa, act.projection, reach_one_formulas(rng, sa.model, 20));
  mismatches += static_cast<int>(tp.mismatches.size());
  checked += tp.checked;
  double t = seconds_since(start);
  std::ostringstream os;
  os << "50 unravelings: " << invalid << " invalid, " << morphism << " morphism failures; fixture "
     << (source_super ? "super-additive" : "NOT super-additive") << ", actualized to " << act.window.model.size()
     << " worlds, interior additivity " << (additive ? "holds" : "fails") << ", morphism "
     << (act_morphism ? "ok" : "fails") << "; " << checked << " preservation pairs, " << mismatches
     << " mismatches, " << t << " s";
  bool pass = invalid == 0 && morphism == 0 && source_super && additive && act_morphism && mismatches == 0 &&
              checked > 0 && t < 120.0;
  return {pass, os.str()};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(5);
  int disagreements = 0;
  for (int i = 0; i < 1000; ++i) {
    kx::KripkeModel m = i % 50 == 7 ? kxtest::figure1(i % 100 == 7 ? 'a' : 'b')
                                    : kx::random_model(kx::suite_params(31, i));
    if (i % 2) m = kxtest::scramble_choices(m, rng);
    auto f = kxtest::random_surface_formula(rng, 4, m.agents, props_of(m));
    auto ext = kx::extension(m, f);
    WorldId w = static_cast<WorldId>(rng() % m.size());
    if (kx::eval(m, w, f) != static_cast<bool>(ext[w])) ++disagreements;
  }
  return {disagreements == 0, "1000 triples, " + std::to_string(disagreements) + " disagreements"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> expect_fail;
  app.add_option("--expect-fail", expect_fail, "criteria known to fail");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"bomb-squad regression", figure1_regression},
      {"soundness suite", soundness},
      {"derived theorems", derived_theorems},
      {"refinement", refinement},
      {"knowledge equivalences", knowledge_equivalences},
      {"non-validity witness", non_validity_witness},
      {"transformations", transformations},
      {"oracle equivalence", oracle_equivalence},
  };
  std::set<int> failed;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    int id = static_cast<int>(i) + 1;
    if (!o.pass) failed.insert(id);
    std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  std::set<int> expected(expect_fail.begin(), expect_fail.end());
  std::cout << failed.size() << " of " << criteria.size() << " criteria fail";
  if (!expected.empty()) std::cout << (failed == expected ? " (as expected)" : " (NOT as expected)");
  std::cout << std::endl;
  return failed == expected ? 0 : 1;
}
