#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kxstit/axioms.hpp"
#include "kxstit/bdt.hpp"
#include "kxstit/checker.hpp"
#include "kxstit/dot.hpp"
#include "kxstit/formula.hpp"
#include "kxstit/gen.hpp"
#include "kxstit/model.hpp"
#include "kxstit/transform.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw kx::Error("FileError", "cannot read " + path, {{"path", path}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw kx::Error("FileError", "cannot write " + path, {{"path", path}});
  out << text;
}

bool is_window_doc(const std::string& doc) {
  try {
    auto j = nlohmann::json::parse(doc);
    return j.is_object() && j.contains("horizon");
  } catch (const nlohmann::json::exception&) {
    return false;
  }
}

int error_record(const std::string& code, const std::string& message,
                 const std::map<std::string, std::string>& details = {}) {
  nlohmann::ordered_json j;
  j["error"] = code;
  j["message"] = message;
  j["details"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : details) j["details"][k] = v;
  std::cerr << j.dump() << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model checker for epistemic stit logic over Kripke models"};
  app.require_subcommand(1, 1);

  std::string model_path, world, formula, agent, mode = "actual", out, config_path, root, params_path, figure,
                                                 scenario_path;
  int n = 0, depth = 2, seed = -1;
  bool common = false;
  std::string construction;

  auto* validate = app.add_subcommand("validate", "check the frame conditions of a model or window");
  validate->add_option("model", model_path, "model file")->required();
  validate->add_option("--mode", mode, "actual or super_additive");
  validate->add_option("--n", n, "bound on choice cells per box class (default: tight bound)");

  auto* check = app.add_subcommand("check", "evaluate a formula at a world (exit 0 true, 1 false)");
  check->add_option("model", model_path, "model file")->required();
  check->add_option("--world", world, "world name")->required();
  check->add_option("--formula", formula, "formula")->required();
  check->add_flag("--common", common, "allow the common knowledge operator C");

  auto* report = app.add_subcommand("report", "knowledge flags of an agent for a target formula");
  report->add_option("model", model_path, "model file")->required();
  report->add_option("--world", world, "world name")->required();
  report->add_option("--agent", agent, "agent name")->required();
  report->add_option("--formula", formula, "target formula")->required();

  auto* expand = app.add_subcommand("expand", "print a formula with its macros expanded");
  expand->add_option("--formula", formula, "formula")->required();
  expand->add_flag("--common", common, "allow the common knowledge operator C");

  auto* soundness = app.add_subcommand("soundness", "run the schema suite described by a configuration file");
  soundness->add_option("config", config_path, "suite configuration")->required();

  auto* transform = app.add_subcommand("transform", "unravel a model, or actualize its unraveling");
  transform->add_option("construction", construction, "unravel or actualize")
      ->required()
      ->check(CLI::IsMember({"unravel", "actualize"}));
  transform->add_option("model", model_path, "model file (a window file is actualized directly)")->required();
  transform->add_option("--root", root, "root world of the unraveling");
  transform->add_option("--depth", depth, "horizon of the unraveling");
  transform->add_option("--n", n, "bound for the matrix construction (default: tight bound)");
  transform->add_option("--out", out, "write the result here instead of standard output");

  auto* gen = app.add_subcommand("gen", "generate a model");
  gen->add_option("params", params_path, "generator parameter file");
  gen->add_option("--seed", seed, "override the seed of the parameter file");
  gen->add_option("--figure1", figure, "compile the bomb-defusal scenario, case a or b")
      ->check(CLI::IsMember({"a", "b"}));
  gen->add_option("--scenario", scenario_path, "compile a branching-time scenario file");
  gen->add_option("--out", out, "write the model here instead of standard output");

  auto* dot = app.add_subcommand("dot", "print the model as a Graphviz digraph");
  dot->add_option("model", model_path, "model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return error_record("UsageError", e.what());
  }

  try {
    if (*validate) {
      std::string doc = read_file(model_path);
      auto m = kx::parse_mode(mode);
      if (is_window_doc(doc)) {
        auto w = kx::load_window(doc);
        auto r = kx::validate_window(w, m, n > 0 ? n : kx::tight_bound(w.model));
        std::cout << kx::report_json(r, w.model);
        return r.ok() ? 0 : 1;
      }
      auto model = kx::load_model(doc);
      auto r = kx::validate_frame(model, m, n > 0 ? n : kx::tight_bound(model));
      std::cout << kx::report_json(r, model);
      return r.ok() ? 0 : 1;
    }
    if (*check) {
      auto m = kx::load_model_file(model_path);
      bool v = kx::eval(m, world, kx::parse(formula, {common}));
      std::cout << (v ? "true" : "false") << "\n";
      return v ? 0 : 1;
    }
    if (*report) {
      auto m = kx::load_model_file(model_path);
      auto r = kx::knowledge_report(m, m.world(world), agent, kx::parse(formula));
      std::cout << kx::knowledge_report_json(r, m);
      return 0;
    }
    if (*expand) {
      std::cout << kx::print(kx::expand_macros(kx::parse(formula, {common}))) << "\n";
      return 0;
    }
    if (*soundness) {
      auto base = std::filesystem::path(config_path).parent_path().string();
      auto c = kx::load_suite_config(read_file(config_path), base.empty() ? "." : base);
      auto r = c.derived ? kx::derived_theorem_suite(c.models, c.policy) : kx::soundness_suite(c.models, c.policy);
      std::cout << r.to_json(c.models);
      return r.ok() ? 0 : 1;
    }
    if (*transform) {
      std::string doc = read_file(model_path);
      nlohmann::ordered_json j;
      kx::MorphismReport mor;
      if (is_window_doc(doc)) {
        if (construction != "actualize")
          throw kx::Error("UsageError", "window files can only be actualized");
        auto w = kx::load_window(doc);
        auto act = kx::actualize(w, n > 0 ? std::optional<int>(n) : std::nullopt);
        mor = kx::check_bounded_morphism(act.projection, act.window, w.model);
        j["window"] = nlohmann::ordered_json::parse(kx::save_window(act.window));
        j["projection"] = nlohmann::json::parse(kx::projection_json(act.projection, act.window.model, w.model));
        j["morphism"] = nlohmann::ordered_json::parse(mor.to_json(act.window.model, w.model));
      } else {
        auto m = kx::load_model(doc);
        if (root.empty()) throw kx::Error("UsageError", "--root is required for model files");
        auto u = kx::unravel(m, root, depth);
        if (construction == "unravel") {
          mor = kx::check_bounded_morphism(u.projection, u.window, m);
          j["window"] = nlohmann::ordered_json::parse(kx::save_window(u.window));
          j["projection"] = nlohmann::json::parse(kx::projection_json(u.projection, u.window.model, m));
          j["morphism"] = nlohmann::ordered_json::parse(mor.to_json(u.window.model, m));
        } else {
          auto act = kx::actualize(u.window, n > 0 ? std::optional<int>(n) : std::nullopt);
          std::vector<kx::WorldId> composed;
          for (kx::WorldId x : act.projection) composed.push_back(u.projection[x]);
          mor = kx::check_bounded_morphism(composed, act.window, m);
          j["window"] = nlohmann::ordered_json::parse(kx::save_window(act.window));
          j["projection"] = nlohmann::json::parse(kx::projection_json(composed, act.window.model, m));
          j["morphism"] = nlohmann::ordered_json::parse(mor.to_json(act.window.model, m));
        }
      }
      write_output(out, j.dump(2) + "\n");
      return mor.ok() ? 0 : 1;
    }
    if (*gen) {
      kx::KripkeModel m;
      if (!figure.empty()) {
        m = kx::bdt_to_kripke(kx::figure1_scenario(figure[0]));
      } else if (!scenario_path.empty()) {
        m = kx::bdt_to_kripke(kx::load_scenario(read_file(scenario_path)));
      } else {
        kx::GenParams p = params_path.empty() ? kx::GenParams{} : kx::load_gen_params(read_file(params_path));
        if (seed >= 0) p.seed = static_cast<std::uint64_t>(seed);
        m = kx::random_model(p);
      }
      write_output(out, kx::save_model(m));
      return 0;
    }
    if (*dot) {
      std::string doc = read_file(model_path);
      std::cout << kx::to_dot(is_window_doc(doc) ? kx::load_window(doc).model : kx::load_model(doc));
      return 0;
    }
  } catch (const kx::Error& e) {
    return error_record(e.code(), e.what(), e.details());
  } catch (const std::exception& e) {
    return error_record("InternalError", e.what());
  }
  return 2;
}
