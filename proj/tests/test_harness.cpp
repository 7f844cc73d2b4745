#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "diagforge/corpus.hpp"
#include "diagforge/harness.hpp"

using namespace diagforge;

namespace {

ExperimentReport go(const std::string& name, std::optional<std::string> verifier = std::nullopt) {
  ExperimentConfig cfg;
  cfg.experiment = name;
  cfg.verifier = std::move(verifier);
  return run_experiment(cfg);
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << body;
  return path;
}

// Every certificate a report carries says it re-verified.
bool all_verified(const nlohmann::json& body) {
  for (const auto& c : body.at("certificates")) {
    if (!c.value("verified", false)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("seed lists") {
  CHECK(parse_seed_list("4") == std::vector<std::uint64_t>{4});
  CHECK(parse_seed_list("1,2,5") == std::vector<std::uint64_t>{1, 2, 5});
  CHECK(parse_seed_list("3..6") == std::vector<std::uint64_t>{3, 4, 5, 6});
  CHECK(parse_seed_list("0,7..8") == std::vector<std::uint64_t>{0, 7, 8});
  for (const char* bad : {"", "a", "1,", "-1", "5..2", "1..x"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_seed_list(bad), ConfigError);
  }
}

TEST_CASE("config files") {
  const auto path = temp_file("diagforge_cfg.toml",
                              "verifier = \"bounded:500\"\nseed = [1, 2]\nfuel = 2000\nT = 300\ntrials = 120\n");
  ExperimentConfig base;
  base.experiment = "demo-turing";
  const ExperimentConfig cfg = load_config_file(path.string(), base);
  CHECK(cfg.verifier == "bounded:500");
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2});
  CHECK(cfg.fuel == 2000);
  CHECK(cfg.T == 300u);
  CHECK(cfg.trials == 120u);
  CHECK(cfg.experiment == "demo-turing");

  CHECK(load_config_file(temp_file("diagforge_cfg2.toml", "seed = \"2..4\"\n").string(), base).seeds.size() == 3);
  CHECK_THROWS_AS(load_config_file(temp_file("diagforge_bad1.toml", "colour = 1\n").string(), base), ConfigError);
  CHECK_THROWS_AS(load_config_file(temp_file("diagforge_bad2.toml", "fuel = \"lots\"\n").string(), base), ConfigError);
  CHECK_THROWS_AS(load_config_file(temp_file("diagforge_bad3.toml", "fuel = \n").string(), base), ConfigError);
  CHECK_THROWS_AS(load_config_file("/nonexistent/diagforge.toml", base), ConfigError);
}

TEST_CASE("experiments reject bad configuration") {
  CHECK_THROWS_AS(go("no-such-thing"), UnknownExperiment);
  CHECK_THROWS_AS(go("demo-turing", "bogus:1"), ConfigError);
  ExperimentConfig cfg;
  cfg.experiment = "demo-time-bounded";
  cfg.T = 3;
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
  cfg.T = std::nullopt;
  cfg.seeds.clear();
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
  cfg.experiment = "demo-calibration";
  cfg.seeds = {0};
  cfg.trials = 10;
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
  cfg.experiment = "safety-audit";
  cfg.trials.reset();
  cfg.task = "nonsense";
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("safe defaults confirm") {
  for (const char* name : {"demo-godel", "demo-turing", "demo-time-bounded", "demo-planning", "demo-reachability",
                           "demo-v2-halting", "demo-v2-time-bounded", "safety-audit", "measure-c"}) {
    CAPTURE(name);
    const ExperimentReport r = go(name);
    CHECK(r.summary == Summary::ConfirmsTheorem);
    CHECK(r.exit_code() == 0);
    CHECK(r.body.at("schema_version") == 1);
    CHECK(r.body.at("summary") == "ConfirmsTheorem");
    CHECK(all_verified(r.body));
  }
}

TEST_CASE("unsafe verifiers are exposed") {
  const std::pair<const char*, const char*> runs[] = {
      {"demo-godel", "liar:10000"},
      {"demo-turing", "const:does-not-halt"},
      {"demo-turing", "const:halts"},
      {"demo-time-bounded", "const:does-not-halt-within-t:990"},
      {"demo-planning", "const:halts"},
      {"demo-reachability", "const:halts-within-t"},
      {"demo-v2-halting", "const:always-halts"},
      {"demo-v2-time-bounded", "const:halts-within-t"},
      {"safety-audit", "liar:100"},
  };
  for (const auto& [name, verifier] : runs) {
    CAPTURE(name);
    CAPTURE(verifier);
    ExperimentConfig cfg;
    cfg.experiment = name;
    cfg.verifier = verifier;
    cfg.fuel = 20'000;
    cfg.trials = 100;
    const ExperimentReport r = run_experiment(cfg);
    CHECK(r.summary == Summary::ExhibitsUnsafety);
    CHECK(r.targets_unsafe);
    CHECK(r.exit_code() == 0);
  }
  // A safe verifier that somehow exhibits nothing useful is not a success.
  ExperimentReport r;
  r.summary = Summary::ExhibitsUnsafety;
  CHECK(r.exit_code() == 1);
  r.summary = Summary::Inconclusive;
  CHECK(r.exit_code() == 1);
}

TEST_CASE("reports are reproducible") {
  ExperimentConfig cfg;
  cfg.experiment = "demo-turing";
  cfg.seeds = {0, 1, 2};
  CHECK(run_experiment(cfg).body.dump() == run_experiment(cfg).body.dump());
  cfg.experiment = "build-corpus";
  cfg.corpus_size = 40;
  CHECK(run_experiment(cfg).body.dump() == run_experiment(cfg).body.dump());
  CHECK(run_experiment(cfg).body.at("per_seed").size() == 3);
}

TEST_CASE("corpus") {
  CHECK(build_corpus(0, 0).empty());
  CHECK_THROWS_AS(build_corpus(201, 0), std::invalid_argument);
  CHECK(to_json(build_corpus(50, 1)).dump() == to_json(build_corpus(50, 1)).dump());
  CHECK(to_json(build_corpus(50, 1)).dump() != to_json(build_corpus(50, 2)).dump());
  // Frozen fixture for the default corpus.
  const auto corpus = build_corpus(50, 0);
  std::size_t halts = 0;
  std::size_t diverges = 0;
  for (const auto& e : corpus) {
    halts += e.truth.status == GroundTruth::Status::Halts;
    diverges += e.truth.status == GroundTruth::Status::Diverges;
  }
  CHECK(halts == 26);
  CHECK(diverges == 24);
}
