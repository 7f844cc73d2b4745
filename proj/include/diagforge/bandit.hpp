#pragma once

#include <cstdint>
#include <optional>

#include <nlohmann/json.hpp>

#include "diagforge/hash.hpp"
#include "diagforge/verifier.hpp"

namespace diagforge {

/// A {0, 1} reward source.
class Arm {
 public:
  enum class Kind : std::uint8_t { Bernoulli, VerifierBacked };

  static Arm bernoulli(std::uint64_t num, std::uint64_t den);
  /// Reward 1 iff the verifier, asked about (p, input), answers `target`.
  /// The registry must outlive the arm.
  static Arm verifier_backed(const Registry& registry, VerifierSpec spec, Program p, Value input, Verdict target);

  Kind kind() const { return kind_; }
  bool draw(SplitMix64& rng) const;

 private:
  Arm() = default;
  Kind kind_ = Kind::Bernoulli;
  std::uint64_t num_ = 0;
  std::uint64_t den_ = 1;
  const Registry* registry_ = nullptr;
  VerifierSpec spec_;
  Program program_;
  Value input_;
  Verdict target_ = Verdict::DontKnow;
};

struct BAIConfig {
  std::uint64_t delta_num = 1;
  std::uint64_t delta_den = 100;
  std::uint64_t pull_cap = 1'000'000;
};

struct BAIResult {
  int winner = 0;  // 1 or 2; 0 means the pull cap was reached
  std::uint64_t total_pulls = 0;
  std::uint64_t pulls[2] = {0, 0};
  std::uint64_t successes[2] = {0, 0};
  std::uint64_t seed = 0;

  bool cap_exceeded() const { return winner == 0; }
  double mean(int arm) const;
};

/// Runs the elimination schedule; both arms draw from one stream seeded by
/// `seed`. Throws std::invalid_argument unless 0 < delta < 1/2.
BAIResult identify_best(const Arm& arm1, const Arm& arm2, const BAIConfig& cfg, std::uint64_t seed);

nlohmann::json to_json(const BAIResult& r);

struct CalibrationReport {
  enum class Verdict : std::uint8_t { InWindow, Violated, NoClaim };

  ProbabilityEstimate claimed;       // how often the verifier says it terminates
  ProbabilityEstimate certified;     // halt witnesses among all runs
  double certified_lo = 0.0;         // interval widened over undetermined runs
  double certified_hi = 1.0;
  std::uint64_t halted = 0;
  std::uint64_t cycled = 0;
  std::uint64_t undetermined = 0;    // runs with neither certificate
  double window = 0.25;
  Verdict verdict = Verdict::NoClaim;
};

std::string_view to_string(CalibrationReport::Verdict v);

/// Compares the verifier's termination-claim frequency on (p, p) against the
/// certified halting frequency of p run on itself, over seeds seed + i.
/// Requires trials >= 100.
CalibrationReport audit_calibration(const Registry& registry, const VerifierSpec& spec, const Program& p,
                                    std::uint64_t trials, std::uint64_t fuel_per_run, std::uint64_t seed);

nlohmann::json to_json(const CalibrationReport& r);

}  // namespace diagforge
