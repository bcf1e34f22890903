// rwre: command line front end for the experiment pipelines.
//
//   rwre <kind> [--config FILE] [--out DIR] [--workers N] [--seed S] [kind flags]
//   rwre run --config FILE
//   rwre reproduce DIR [--out SCRATCH] [--workers N]
//
// Exit status: 0 success, 2 a check failed, 1 error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rwre/errors.hpp"
#include "rwre/experiment.hpp"
#include "rwre/serialization.hpp"

namespace {

using rwre::Json;

struct Common {
  std::string config;
  std::string out;
  std::optional<unsigned> workers;
  std::optional<std::uint64_t> seed;
  std::string model;
};

struct KindFlags {
  std::optional<std::size_t> n_paths, horizon, n_env, n_max;
  std::optional<long> boxes;
  std::string stop, ell, k_list;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "Experiment config (JSON)");
  app->add_option("--out", c.out, "Output directory");
  app->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "Master seed");
}

Json parse_list(const std::string& text, bool integers) {
  Json out = Json::array();
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (integers) {
      out.push_back(std::stoll(item));
    } else {
      out.push_back(std::stod(item));
    }
  }
  return out;
}

Json load_json(const std::string& path) {
  try {
    return Json::parse(rwre::read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw rwre::ConfigError(path + ": " + e.what());
  }
}

Json build_config(const std::string& kind, const Common& c, const KindFlags& f) {
  Json cfg = c.config.empty() ? Json{{"kind", kind}} : load_json(c.config);
  if (!cfg.is_object()) throw rwre::ConfigError(c.config + ": expected a JSON object");
  if (kind != "run") {
    if (cfg.contains("kind") && cfg["kind"] != kind)
      throw rwre::ConfigError("config kind " + cfg["kind"].dump() + " does not match subcommand " +
                              kind);
    cfg["kind"] = kind;
  }
  if (!c.model.empty()) cfg["model"] = load_json(c.model);
  if (!c.out.empty()) cfg["output_dir"] = c.out;
  if (c.workers) cfg["workers"] = *c.workers;
  if (c.seed) cfg["seed"] = *c.seed;

  Json& p = cfg["params"];
  if (p.is_null()) p = Json::object();
  if (f.n_paths) p["n_paths"] = *f.n_paths;
  if (f.horizon) p["horizon"] = *f.horizon;
  if (f.n_env) p["n_env"] = *f.n_env;
  if (f.n_max) p["n_max"] = *f.n_max;
  if (f.boxes) p["boxes"] = *f.boxes;
  if (!f.ell.empty()) p["ell"] = parse_list(f.ell, false);
  if (!f.k_list.empty()) p["k_list"] = parse_list(f.k_list, true);
  if (!f.stop.empty()) {
    if (f.stop == "fixed") {
      p["stop"] = "fixed";
    } else if (f.stop.rfind("level:", 0) == 0) {
      p["stop"] = Json{{"hit_level", std::stod(f.stop.substr(6))}};
    } else if (f.stop.rfind("box:", 0) == 0) {
      p["stop"] = Json{{"exit_box", std::stoll(f.stop.substr(4))}};
    } else {
      throw rwre::ConfigError("--stop expects fixed, level:<L> or box:<R>");
    }
  }
  return cfg;
}

int report(const rwre::ExperimentResult& result) {
  std::cout << rwre::summary_table(result.summary);
  for (const auto& c : result.checks)
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  " << c.detail << '\n';
  return result.all_passed() ? 0 : 2;
}

int run_reproduce(const std::string& dir, const Common& c) {
  const std::string scratch =
      c.out.empty() ? (std::filesystem::temp_directory_path() / "rwre-reproduce").string() : c.out;
  const auto rep = rwre::reproduce_directory(dir, scratch, c.workers);
  if (!rep.version_match)
    std::cout << "FAIL version  recorded " << rep.recorded_version << ", current "
              << rep.current_version << '\n';
  for (const auto& f : rep.files) {
    std::cout << (f.passed ? "PASS " : "FAIL ") << f.file << '\n';
    if (f.first_divergent_record) {
      std::cout << "  first divergent record: " << *f.first_divergent_record << '\n'
                << "  expected: " << f.expected_line << '\n'
                << "  actual:   " << f.actual_line << '\n';
    }
  }
  return rep.passed() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random walks in random environment: experiment runner"};
  app.require_subcommand(1);

  Common common;
  KindFlags flags;
  std::string reproduce_dir;

  for (const auto& kind : rwre::experiment_kinds()) {
    if (kind == "reproduce") continue;
    auto* sub = app.add_subcommand(kind, "Run the " + kind + " pipeline");
    add_common(sub, common);
    if (kind != "gibbs-check" && kind != "singular-ne")
      sub->add_option("--model", common.model, "Environment model (JSON)");
    if (kind == "simulate" || kind == "pov-cesaro" || kind == "zk")
      sub->add_option("--n-paths", flags.n_paths, "Number of annealed replicates");
    if (kind == "simulate") {
      sub->add_option("--horizon", flags.horizon, "Maximum number of steps");
      sub->add_option("--stop", flags.stop, "fixed, level:<L> or box:<R>");
    }
    if (kind == "simulate" || kind == "kalikow" || kind == "zk")
      sub->add_option("--ell", flags.ell, "Direction, comma separated");
    if (kind == "kalikow") sub->add_option("--boxes", flags.boxes, "Scan boxes of radius 1..K");
    if (kind == "kalikow" || kind == "density1d")
      sub->add_option("--n-env", flags.n_env, "Environment draws");
    if (kind == "zk") sub->add_option("--k-list", flags.k_list, "Half-space indices, comma separated");
    if (kind == "singular-ne") sub->add_option("--n-max", flags.n_max, "Largest n");
  }
  auto* run = app.add_subcommand("run", "Run the pipeline named by the config's kind");
  add_common(run, common);
  run->get_option("--config")->required();

  auto* rep = app.add_subcommand("reproduce", "Re-run a manifest and compare digests");
  rep->add_option("dir", reproduce_dir, "Directory holding manifest.json")->required();
  rep->add_option("--out", common.out, "Scratch directory for the re-run");
  rep->add_option("--workers", common.workers, "Worker threads")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    auto* chosen = app.get_subcommands().front();
    if (chosen == rep) return run_reproduce(reproduce_dir, common);
    const Json cfg = build_config(chosen->get_name(), common, flags);
    const auto config = rwre::config_from_json(cfg);
    return report(rwre::run_experiment(config));
  } catch (const std::exception& e) {
    std::cerr << "rwre " << app.get_subcommands().front()->get_name() << ": " << e.what() << '\n';
    return 1;
  }
}
