#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "diagforge/hash.hpp"
#include "diagforge/verifier.hpp"

namespace diagforge {

/// A corpus entry together with what a bounded run certified about it.
struct CertifiedEntry {
  CorpusEntry entry;
  std::string family;  // straight-line, loop, conditional, coin, input
  GroundTruth truth;   // run with seed 0 under the free policy
};

inline constexpr std::uint64_t kCorpusCertifyBudget = 100'000;

/// Deterministic ground-truth corpus of small oracle-free programs: halting
/// straight-line code, certified loops, nested conditionals, coin programs
/// and input-dependent programs. Throws std::invalid_argument if size > 200.
std::vector<CertifiedEntry> build_corpus(std::size_t size, std::uint64_t seed);

std::vector<CorpusEntry> entries_of(const std::vector<CertifiedEntry>& corpus);

nlohmann::json to_json(const std::vector<CertifiedEntry>& corpus);

/// An arbitrary syntactically valid program over every construct of the
/// language (not necessarily meaningful to run). Used for round-trip checks.
Program random_program(SplitMix64& rng, int max_depth = 5);

}  // namespace diagforge
