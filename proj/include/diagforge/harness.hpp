#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace diagforge {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnknownExperiment : public std::invalid_argument {
 public:
  explicit UnknownExperiment(const std::string& name) : std::invalid_argument("unknown experiment '" + name + "'") {}
};

struct ExperimentConfig {
  std::string experiment;
  std::optional<std::string> verifier;  // experiment-specific default when unset
  std::optional<std::string> task;      // safety-audit only
  std::vector<std::uint64_t> seeds{0};
  std::uint64_t fuel = 1'000'000;
  std::optional<std::uint64_t> T;
  std::optional<std::uint64_t> trials;
  std::uint64_t pull_cap = 1'000'000;
  std::uint64_t corpus_size = 50;
  std::string out_path;
};

enum class Summary : std::uint8_t { ConfirmsTheorem, ExhibitsUnsafety, Inconclusive };

std::string_view to_string(Summary s);

struct ExperimentReport {
  nlohmann::json body;
  Summary summary = Summary::Inconclusive;
  bool targets_unsafe = false;  // the verifier is not one of the safe built-ins

  /// 0 iff the summary is what the experiment is for.
  int exit_code() const;
};

const std::vector<std::string>& experiment_names();

/// Runs a named experiment. Throws UnknownExperiment or ConfigError.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Reads a TOML file whose keys mirror the command-line flags (verifier,
/// task, seed, fuel, T, trials, pull_cap, corpus_size, out). Keys present in
/// the file overwrite `base`. Throws ConfigError.
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base);

/// "1,2,5" or "3..7" (inclusive). Throws ConfigError.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

nlohmann::json config_to_json(const ExperimentConfig& cfg);

}  // namespace diagforge
