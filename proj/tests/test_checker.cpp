#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "kxstit/checker.hpp"
#include "kxstit/gen.hpp"

using kx::Formula;
using kx::parse;

namespace {

const std::vector<std::string> kProps = {"p", "q"};

// a, b see different parts of three worlds; reachability joins all of them
kx::KripkeModel chain3() {
  return kx::load_model(R"({"format_version": 1, "agents": ["a", "b"], "worlds": ["u", "v", "w"],
    "r_box": [["u"], ["v"], ["w"]], "succ": {"u": "u", "v": "v", "w": "w"},
    "choice": {"a": [["u"], ["v"], ["w"]], "b": [["u"], ["v"], ["w"]]},
    "epistemic": {"a": [["u", "v"], ["w"]], "b": [["u"], ["v", "w"]]},
    "valuation": {"p": ["u", "v"], "q": ["u", "v", "w"]}})");
}

kx::KripkeModel model_for(int i, std::mt19937_64& rng) {
  auto m = kx::random_model(kx::suite_params(31, i));
  return i % 2 ? kxtest::scramble_choices(m, rng) : m;
}

bool holds_c(const kx::KripkeModel& m, const std::string& w, const std::string& f) {
  return kx::eval(m, w, parse(f, {true}));
}

}  // namespace

TEST(Eval, AgreesWithExtension) {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const kx::KripkeModel m = i % 50 == 7 ? kxtest::figure1(i % 100 == 7 ? 'a' : 'b') : model_for(i, rng);
    std::vector<std::string> props;
    for (const auto& [name, ext] : m.valuation) props.push_back(name);
    auto f = kxtest::random_surface_formula(rng, 4, m.agents, props);
    auto ext = kx::extension(m, f);
    kx::WorldId w = static_cast<kx::WorldId>(rng() % m.size());
    ASSERT_EQ(kx::eval(m, w, f), static_cast<bool>(ext[w])) << kx::print(f) << " at " << m.worlds[w];
    ++checked;
  }
  EXPECT_EQ(checked, 1000);
}

TEST(Eval, NormalizePreservesTruth) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 300; ++i) {
    auto m = model_for(i, rng);
    auto f = kxtest::random_surface_formula(rng, 3, m.agents, kProps);
    auto g = kx::normalize(f);
    for (kx::WorldId w = 0; w < m.size(); ++w) ASSERT_EQ(kx::eval(m, w, f), kx::eval(m, w, g)) << kx::print(f);
  }
}

TEST(Eval, NamedWorldAndErrors) {
  auto m = kxtest::one_world();
  EXPECT_FALSE(kx::eval(m, "w", parse("p")));
  EXPECT_TRUE(kx::eval(m, "w", parse("X ~p & Y ~p")));
  EXPECT_THROW(kx::eval(m, "nowhere", parse("p")), kx::Error);
  EXPECT_THROW(kx::eval(m, "w", parse("[zed] p")), kx::Error);
}

TEST(Validity, Examples) {
  auto m = chain3();
  EXPECT_TRUE(kx::valid_on_model(m, parse("p | ~p")).valid);
  auto v = kx::valid_on_model(m, parse("p"));
  EXPECT_FALSE(v.valid);
  ASSERT_TRUE(v.counterexample.has_value());
  EXPECT_EQ(m.worlds[*v.counterexample], "w");
}

TEST(Common, ReachabilityOverAllAgents) {
  auto m = chain3();
  EXPECT_TRUE(kxtest::holds(m, "u", "K{a} p"));
  EXPECT_TRUE(kxtest::holds(m, "u", "K{b} p"));
  EXPECT_FALSE(holds_c(m, "u", "C p"));
  EXPECT_TRUE(holds_c(m, "u", "C q"));
  EXPECT_FALSE(kxtest::holds(m, "v", "K{b} p"));
  EXPECT_EQ(kx::common_knowledge_classes(m).class_count(), 1);
  EXPECT_TRUE(holds_c(m, "w", "C q -> K{a} q & K{b} q"));
  EXPECT_THROW(parse("C p"), kx::Error);
}

TEST(Knowledge, ReportFlagsMatchExpansions) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    auto m = kx::random_model(kx::suite_params(12, i));
    auto phi = kxtest::random_surface_formula(rng, 2, m.agents, kProps);
    const auto& a = m.agents[rng() % m.agents.size()];
    kx::WorldId w = static_cast<kx::WorldId>(rng() % m.size());
    auto r = kx::knowledge_report(m, w, a, phi);
    EXPECT_TRUE(r.warnings.empty() || !r.in_fragment);
    EXPECT_EQ(r.ex_ante, kx::eval(m, w, Formula::box(Formula::knows(a, Formula::box(Formula::next(phi))))));
    EXPECT_EQ(r.ex_interim, kx::eval(m, w, Formula::knows(a, Formula::stit(a, Formula::next(phi)))));
    EXPECT_EQ(r.does, kx::eval(m, w, Formula::stit(a, Formula::next(phi))));
    EXPECT_EQ(r.know_how, kx::eval(m, w, Formula::know_how(a, phi)));
    EXPECT_EQ(r.ex_post, kx::eval(m, w, Formula::ex_post(a, phi)));
  }
}

TEST(Knowledge, InvalidFrameWarns) {
  std::mt19937_64 rng(2);
  auto m = kxtest::scramble_choices(kx::random_model(kx::suite_params(3, 5)), rng);
  m.epistemic[0] = kx::Partition::single(m.size());
  auto r = kx::knowledge_report(m, 0, m.agents[0], parse("p"));
  bool frame_ok = kx::validate_frame(m, kx::AdditivityMode::Actual, kx::tight_bound(m)).ok();
  EXPECT_EQ(r.warnings.empty(), frame_ok);
  EXPECT_TRUE(kx::knowledge_report(m, 0, m.agents[0], parse("p"), false).warnings.empty());
  EXPECT_FALSE(kx::knowledge_report(m, 0, m.agents[0], parse("[a] p"), false).in_fragment);
}

TEST(Refinement, HoldsOnGeneratedAndFigureModels) {
  std::mt19937_64 rng(4);
  int checked = 0;
  auto run = [&](const kx::KripkeModel& m, const std::vector<std::string>& props) {
    std::vector<Formula> phis;
    for (int k = 0; k < 20; ++k) phis.push_back(kxtest::random_surface_formula(rng, 2, m.agents, props));
    auto r = kx::check_refinement(m, m.agents, phis);
    EXPECT_TRUE(r.ok()) << (r.ok() ? "" : r.failures.front().implication + " " + kx::print(r.failures.front().formula));
    checked += r.checked;
  };
  for (int i = 0; i < 200; ++i) run(kx::random_model(kx::suite_params(2, i)), kProps);
  for (char c : {'a', 'b'}) run(kxtest::figure1(c), {"d", "d_L", "d_B", "s", "f_B", "r_L"});
  EXPECT_GT(checked, 200 * 20);
}

TEST(KnowledgeNotions, EquivalencesAndContrast) {
  std::mt19937_64 rng(10);
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
      auto ante = Formula::box(Formula::knows(a, Formula::box(Formula::next(phi))));
      auto ante2 = Formula::box(Formula::knows(a, Formula::next(phi)));
      auto doing = Formula::stit(a, Formula::next(phi));
      auto how = Formula::box(Formula::knows(a, Formula::diamond(Formula::knows(a, doing))));
      auto how2 = Formula::diamond(Formula::knows(a, doing));
      auto eq = [](Formula l, Formula r) { return Formula::conj(Formula::implies(l, r), Formula::implies(r, l)); };
      EXPECT_TRUE(kx::valid_on_model(m, eq(ante, ante2)).valid) << kx::print(phi);
      EXPECT_TRUE(kx::valid_on_model(m, eq(how, how2)).valid) << kx::print(phi);
      auto contrast = Formula::implies(
          Formula::knows(a, Formula::stit(a, Formula::next(Formula::yesterday(Formula::stit(b, Formula::next(phi)))))),
          Formula::box(Formula::next(phi)));
      EXPECT_TRUE(kx::valid_on_model(m, contrast).valid) << kx::print(phi);
    }
  }
}
