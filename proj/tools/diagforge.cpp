#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "diagforge/harness.hpp"

using diagforge::ConfigError;
using diagforge::ExperimentConfig;

namespace {

struct Flags {
  std::optional<std::string> verifier, task, seeds, out, config;
  std::optional<std::uint64_t> fuel, T, trials, pull_cap, corpus_size;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--verifier", f.verifier, "verifier id: bounded:N, liar:N[:p/q], abstain, const:V[:steps], coin:p/q:V");
  sub->add_option("--task", f.task, "task for safety-audit");
  sub->add_option("--seed", f.seeds, "seed list: 3 | 1,2,5 | 0..9");
  sub->add_option("--fuel", f.fuel, "step budget for runs");
  sub->add_option("--T", f.T, "time limit");
  sub->add_option("--trials", f.trials, "trial count");
  sub->add_option("--pull-cap", f.pull_cap, "bandit pull cap");
  sub->add_option("--corpus-size", f.corpus_size, "corpus size (at most 200)");
  sub->add_option("--out", f.out, "write the JSON report here instead of stdout");
  sub->add_option("--config", f.config, "TOML file; flags override it");
}

ExperimentConfig resolve(const std::string& name, const Flags& f) {
  ExperimentConfig cfg;
  cfg.experiment = name;
  if (f.config) cfg = diagforge::load_config_file(*f.config, cfg);
  if (f.verifier) cfg.verifier = f.verifier;
  if (f.task) cfg.task = f.task;
  if (f.seeds) cfg.seeds = diagforge::parse_seed_list(*f.seeds);
  if (f.out) cfg.out_path = *f.out;
  if (f.fuel) cfg.fuel = *f.fuel;
  if (f.T) cfg.T = f.T;
  if (f.trials) cfg.trials = f.trials;
  if (f.pull_cap) cfg.pull_cap = *f.pull_cap;
  if (f.corpus_size) cfg.corpus_size = *f.corpus_size;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diagforge: diagonal constructions against program verifiers"};
  app.require_subcommand(1);
  Flags flags;
  for (const auto& name : diagforge::experiment_names()) add_flags(app.add_subcommand(name), flags);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const ExperimentConfig cfg = resolve(name, flags);
    const auto report = diagforge::run_experiment(cfg);
    const std::string text = report.body.dump(2) + "\n";
    if (cfg.out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(cfg.out_path);
      if (!(out << text)) {
        std::cerr << "diagforge: cannot write " << cfg.out_path << "\n";
        return 2;
      }
      std::cerr << name << ": " << diagforge::to_string(report.summary) << "\n";
    }
    return report.exit_code();
  } catch (const std::invalid_argument& e) {  // ConfigError, UnknownExperiment, bad verifier text
    std::cerr << "diagforge: " << e.what() << "\n";
    return 2;
  }
}
