#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "kxstit/gen.hpp"
#include "kxstit/transform.hpp"

using kx::Formula;
using kx::parse;
using kx::WorldId;

namespace {

std::string code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const kx::Error& e) {
    return e.code();
  }
  return "";
}

std::vector<Formula> reach_one_formulas(std::mt19937_64& rng, const kx::KripkeModel& m, int count) {
  std::vector<Formula> out;
  std::vector<std::string> props;
  for (const auto& kv : m.valuation) props.push_back(kv.first);
  for (int i = 0; i < count; ++i) {
    kx::FormulaParams fp;
    fp.seed = rng();
    fp.max_depth = 3;
    fp.props = props;
    fp.agents = m.agents;
    out.push_back(kx::random_formula(fp));
  }
  return out;
}

// earlier worlds of the history through w
std::vector<WorldId> past(const kx::KripkeModel& m, WorldId w) {
  std::vector<WorldId> out;
  while (m.preds[w].size() == 1) {
    w = m.preds[w].front();
    out.push_back(w);
  }
  return out;
}

}  // namespace

TEST(Unravel, OneWorldLoop) {
  auto u = kx::unravel(kxtest::one_world(), "w", 2);
  std::vector<std::string> names = u.window.model.worlds;
  std::sort(names.begin(), names.end());
  EXPECT_EQ(names, (std::vector<std::string>{"w#1", "w.w#0", "w.w#1", "w.w.w#0", "w.w.w#1"}));
  const auto& m = u.window.model;
  int interior = 0;
  for (WorldId x = 0; x < m.size(); ++x) {
    if (!u.window.interior[x]) continue;
    ++interior;
    ASSERT_NE(m.succ[x], kx::kNoWorld);
    EXPECT_NE(m.succ[x], x);
  }
  EXPECT_EQ(interior, 3);
  EXPECT_EQ(m.worlds[m.succ[m.world("w.w#0")]], "w#1");
  EXPECT_EQ(m.worlds[m.succ[m.world("w#1")]], "w.w#1");
  EXPECT_EQ(m.worlds[m.succ[m.world("w.w.w#0")]], "w.w#0");
  EXPECT_EQ(m.succ[m.world("w.w.w#1")], kx::kNoWorld);
  EXPECT_TRUE(kx::check_bounded_morphism(u.projection, u.window, kxtest::one_world()).ok());
  EXPECT_TRUE(kx::validate_window(u.window, kx::AdditivityMode::Actual, 1).ok());
}

TEST(Unravel, Errors) {
  auto m = kxtest::one_world();
  EXPECT_EQ(code_of([&] { kx::unravel(m, "w", 0); }), "HorizonTooSmall");
  EXPECT_EQ(code_of([&] { kx::unravel(m, "nowhere", 1); }), "UnknownWorld");
  auto bad = kx::load_model(R"({"format_version": 1, "agents": ["a"], "worlds": ["x", "y"],
    "r_box": [["x"], ["y"]], "succ": {"x": "y", "y": "x"},
    "choice": {"a": [["x", "y"]]}, "epistemic": {"a": [["x"], ["y"]]}, "valuation": {}})");
  EXPECT_EQ(code_of([&] { kx::unravel(bad, "x", 1); }), "InvalidModel");
}

TEST(Unravel, GeneratedModelsStayValidAndProject) {
  for (int i = 0; i < 50; ++i) {
    auto p = kx::suite_params(21, i);
    auto m = kx::random_model(p);
    auto u = kx::unravel(m, static_cast<WorldId>(i % m.size()), 2);
    auto rep = kx::validate_window(u.window, kx::AdditivityMode::Actual, p.n_bound);
    EXPECT_TRUE(rep.ok()) << i << " " << (rep.failed().empty() ? "" : rep.failed().front());
    auto mor = kx::check_bounded_morphism(u.projection, u.window, m);
    EXPECT_TRUE(mor.ok()) << i << " " << (mor.failures.empty() ? "" : mor.failures.front().relation);
    const auto& w = u.window.model;
    for (WorldId x = 0; x < w.size(); ++x)
      if (u.window.interior[x]) EXPECT_NE(w.succ[x], x);
  }
}

TEST(Unravel, TruthPreservedForReachOne) {
  std::mt19937_64 rng(3);
  int checked = 0;
  for (int i = 0; i < 50; ++i) {
    auto m = kx::random_model(kx::suite_params(22, i));
    auto u = kx::unravel(m, 0, 2);
    auto r = kx::truth_preservation(u.window, m, u.projection, reach_one_formulas(rng, m, 10));
    EXPECT_TRUE(r.ok()) << i << " " << (r.ok() ? "" : r.mismatches.front().formula);
    checked += r.checked;
  }
  EXPECT_GT(checked, 1000);
}

TEST(Unravel, FigureOneJudgmentsSurvive) {
  const auto& fig = kxtest::figure1('a');
  auto u = kx::unravel(fig, "m4_h10", 2);
  // the base model breaks Inverse only at its stutter worlds; any failure of
  // the projection stays there
  auto mor = kx::check_bounded_morphism(u.projection, u.window, fig);
  for (const auto& f : mor.failures) {
    const std::string& base = fig.worlds[u.projection[f.source]];
    EXPECT_TRUE(base.rfind("pre_", 0) == 0 || base.rfind("post_", 0) == 0) << f.relation << " at " << base;
  }
  std::vector<Formula> judgments;
  for (const char* s : {"~d_L & ~d_B", "d", "[Ags] X s", "X(~d_L & ~d_B)", "X [luther] X d_L", "Y [Ags] X d",
                        "Y <> X [luther] X d_L", "[] ~K{luther} [luther] X d_L", "[] K{luther} [] X Y f_B",
                        "~K{luther} Y [benji] X d_B", "X K{luther} Y [Ags] X (d_L | d_B)", "K{luther} [luther] X d_L"})
    judgments.push_back(parse(s));
  auto r = kx::truth_preservation(u.window, fig, u.projection, judgments);
  EXPECT_TRUE(r.ok()) << (r.ok() ? "" : r.mismatches.front().formula);
  EXPECT_GT(r.checked, 0);
}

TEST(Morphism, IdentityAndCollapse) {
  auto m = kx::random_model(kx::suite_params(1, 3));
  std::vector<WorldId> id(m.size());
  std::iota(id.begin(), id.end(), 0);
  EXPECT_TRUE(kx::check_bounded_morphism(id, m, m).ok());

  auto two = kx::load_model(R"({"format_version": 1, "agents": ["a"], "worlds": ["x", "y"],
    "r_box": [["x", "y"]], "succ": {"x": "x", "y": "y"},
    "choice": {"a": [["x", "y"]]}, "epistemic": {"a": [["x", "y"]]}, "valuation": {"p": ["x"]}})");
  auto r = kx::check_bounded_morphism({0, 0}, two, two);
  EXPECT_FALSE(r.atoms);
  ASSERT_FALSE(r.failures.empty());
  EXPECT_EQ(r.failures.front().kind, "atoms");
  EXPECT_EQ(two.worlds[r.failures.front().source], "y");
  EXPECT_FALSE(r.surjective);
  EXPECT_EQ(code_of([&] { kx::check_bounded_morphism({0}, two, two); }), "PartialMap");
}

TEST(Profiles, Examples) {
  auto one = kx::load_model(R"({"format_version": 1, "agents": ["a"], "worlds": ["x", "y", "z"],
    "r_box": [["x", "y", "z"]], "succ": {"x": "x", "y": "y", "z": "z"},
    "choice": {"a": [["x", "z"], ["y"]]}, "epistemic": {"a": [["x"], ["y"], ["z"]]}, "valuation": {}})");
  auto t = kx::choice_profiles(one, 0);
  ASSERT_EQ(t.profiles.size(), 2u);
  for (const auto& p : t.profiles) {
    ASSERT_EQ(p.ags_cells.size(), 1u);
    EXPECT_EQ(one.choice_ags.cell(p.ags_cells[0]), p.members);
  }
  EXPECT_EQ(t.profiles[0].members, (std::vector<WorldId>{0, 2}));
  EXPECT_EQ(t.profile_of(1), 1);

  const auto& fig = kxtest::figure1('a');
  auto ft = kx::choice_profiles(fig, fig.box.class_of(fig.world("m2_h1")));
  EXPECT_EQ(ft.profiles.size(), 4u);
  for (const auto& p : ft.profiles) EXPECT_EQ(p.ags_cells.size(), 1u);

  auto sa = kx::super_additive_example();
  auto st = kx::choice_profiles(sa.model, sa.model.box.class_of(sa.model.world("x1")), 2);
  ASSERT_EQ(st.profiles.size(), 1u);
  EXPECT_EQ(st.profiles[0].ags_cells.size(), 2u);
  EXPECT_EQ(st.profiles[0].enumeration.size(), 2u);
  EXPECT_EQ(code_of([&] { kx::choice_profiles(sa.model, sa.model.box.class_of(sa.model.world("x1")), 1); }),
            "InvalidBound");
  auto padded = kx::choice_profiles(sa.model, sa.model.box.class_of(sa.model.world("e1")), 3);
  EXPECT_EQ(padded.profiles[0].enumeration, std::vector<int>(3, padded.profiles[0].ags_cells[0]));
}

TEST(Actualize, SuperAdditiveFixture) {
  auto sa = kx::super_additive_example();
  EXPECT_FALSE(kx::validate_window(sa, kx::AdditivityMode::Actual, 2).get("Additivity").pass);
  EXPECT_TRUE(kx::validate_window(sa, kx::AdditivityMode::SuperAdditive, 2).ok());

  auto act = kx::actualize(sa);
  EXPECT_EQ(act.n, 2);
  auto rep = kx::validate_window(act.window, kx::AdditivityMode::Actual, 4);
  EXPECT_TRUE(rep.get("Additivity").pass) << rep.get("Additivity").explanation;
  EXPECT_TRUE(rep.ok()) << (rep.failed().empty() ? "" : rep.failed().front());
  auto mor = kx::check_bounded_morphism(act.projection, act.window, sa.model);
  EXPECT_TRUE(mor.ok()) << (mor.failures.empty() ? "" : mor.failures.front().relation + " " + mor.failures.front().kind);

  // index arithmetic against an independent recomputation of the profile tables
  const auto& m = sa.model;
  for (std::size_t x = 0; x < act.projection.size(); x += 7) {
    for (std::size_t p = 0; p < act.history[x].size(); ++p) {
      WorldId v = act.history[x][p];
      auto table = kx::choice_profiles(m, m.box.class_of(v), 2);
      const auto& e = table.profiles[table.profile_of(v)].enumeration;
      int sum = 0;
      for (int k : act.index_fn[x][p]) sum += k;
      EXPECT_EQ(e[sum % 2], m.choice_ags.class_of(v));
    }
    EXPECT_EQ(act.history[x][act.position[x]], act.projection[x]);
  }

  std::mt19937_64 rng(12);
  std::vector<Formula> fs = {parse("p"), parse("q"), parse("X p"), parse("Y q"), parse("[Ags] X p"),
                             parse("[a] X p"), parse("<>[Ags] q"), parse("K{a} q"), parse("[] q")};
  for (const auto& f : reach_one_formulas(rng, m, 20)) fs.push_back(f);
  auto tp = kx::truth_preservation(act.window, sa, act.projection, fs);
  EXPECT_TRUE(tp.ok()) << (tp.ok() ? "" : tp.mismatches.front().formula);
  EXPECT_GT(tp.checked, 0);
}

TEST(Actualize, IndexCorrespondenceOnUnraveledWindows) {
  for (int i = 0; i < 20; ++i) {
    auto m = kx::random_model(kx::suite_params(23, i));
    auto w = kx::unravel(m, 0, 2).window;
    const auto& u = w.model;
    for (WorldId x = 0; x < u.size(); ++x) {
      if (!w.interior[x]) continue;
      for (WorldId y : u.box.cell_of(x)) {
        if (!w.interior[y]) continue;
        auto px = past(u, x), py = past(u, y);
        for (WorldId v : px)
          EXPECT_TRUE(std::any_of(py.begin(), py.end(), [&](WorldId z) { return u.choice_ags.same(v, z); }));
      }
    }
  }
}

TEST(Actualize, ActualSourceComposesWithUnravel) {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 20; ++i) {
    auto m = kx::random_model(kx::suite_params(24, i));
    auto u = kx::unravel(m, 0, 2);
    auto act = kx::actualize(u.window);
    EXPECT_TRUE(kx::validate_window(act.window, kx::AdditivityMode::Actual, kx::tight_bound(act.window.model))
                    .get("Additivity")
                    .pass);
    EXPECT_TRUE(kx::check_bounded_morphism(act.projection, act.window, u.window.model).ok());
    std::vector<WorldId> composed;
    for (WorldId x : act.projection) composed.push_back(u.projection[x]);
    auto tp = kx::truth_preservation(act.window, m, composed, reach_one_formulas(rng, m, 10));
    EXPECT_TRUE(tp.ok()) << i;
  }
}

TEST(Actualize, Errors) {
  auto loop = kx::as_window(kxtest::one_world());
  EXPECT_EQ(code_of([&] { kx::actualize(loop); }), "SourceNotIrreflexive");
  auto small = kx::super_additive_example();
  small.horizon = 0;
  EXPECT_EQ(code_of([&] { kx::actualize(small); }), "WindowTooSmall");
  EXPECT_EQ(code_of([&] { kx::actualize(kx::super_additive_example(), 2, 100); }), "MatrixTooLarge");
}

TEST(Window, UnknownAtTheEdge) {
  auto w = kx::unravel(kxtest::one_world(), "w", 1).window;
  auto ext = kx::extension3(w, parse("X X p"));
  const auto& m = w.model;
  EXPECT_EQ(ext[m.world("w#1")], kx::Truth::Unknown);
  EXPECT_EQ(ext[m.world("w.w#0")], kx::Truth::False);
  auto y = kx::extension3(w, parse("Y p"));
  EXPECT_EQ(y[m.world("w.w#0")], kx::Truth::Unknown);
  EXPECT_EQ(y[m.world("w#1")], kx::Truth::False);
}
