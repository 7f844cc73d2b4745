#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "diagforge/machine.hpp"
#include "diagforge/verifier.hpp"

namespace diagforge {

class BudgetTooSmall : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Self-referential constructions, each parameterised by a registered
/// verifier id. All of them except the Gödel program take a program as input
/// and query the verifier about (input, input), so self_instance() yields
/// the diagonal instance.
enum class Construction : std::uint8_t { Godel, Turing, TuringT, TuringV2, TuringTV2, GodelRandom };

std::string_view to_string(Construction c);

/// Takes (P, T): returns 0 unless T is a valid trace of the verifier on P
/// concluding well-behaved and (P, T) fits P, in which case it returns
/// "Not " followed by P's output on (P, T).
Program build_godel_program(const Registry& registry, std::string_view verifier_id);

/// Halts with 0 iff the verifier says its input, run on itself, does not halt.
Program build_turing_program(const Registry& registry, std::string_view verifier_id);

/// Time-bounded version: the verifier is asked with limit T. Throws
/// BudgetTooSmall when T is below the dispatch overhead.
Program build_turing_T(const Registry& registry, std::string_view verifier_id, std::uint64_t T);

/// Inverted polarity: loops iff the verifier says always-halts.
Program build_turing_program_v2(const Registry& registry, std::string_view verifier_id);

/// Inverted, time-bounded: loops iff the verifier says the instance halts
/// within T + c; otherwise halts. T is the verifier's own running bound.
Program build_turing_T_v2(const Registry& registry, std::string_view verifier_id, std::uint64_t T);

/// Arm 1 is a fair coin, arm 2 pays 1 when the verifier says the instance
/// terminates. Loops iff arm 2 is identified as better at confidence
/// delta_num/delta_den; a run hitting pull_cap pulls gets stuck.
Program build_godel_program_random(const Registry& registry, std::string_view verifier_id,
                                   std::uint64_t delta_num = 1, std::uint64_t delta_den = 100,
                                   std::uint64_t pull_cap = 1'000'000);

/// (p, quoted p).
std::pair<Program, Value> self_instance(const Program& p);

/// Steps the construction spends outside the verifier on its non-looping
/// path, computed from its node structure.
std::uint64_t static_overhead(Construction c);

/// Same quantity measured: runs the construction under metered accounting
/// against a stub that answers the non-looping verdict after `stub_steps`
/// steps, and subtracts the stub's cost.
std::uint64_t measure_overhead_c(Construction c, std::uint64_t T, std::uint64_t stub_steps = 1);

/// What a diagonal run did.
enum class Behaviour : std::uint8_t {
  HaltZero,       // returned Int 0
  HaltOther,      // returned something else (including a fault)
  CertifiedLoop,  // cycle certificate found
  EvalRegress,    // out of fuel with the evaluation stack growing
  Exhausted,      // out of fuel, no further evidence
};

std::string_view to_string(Behaviour b);
Behaviour classify(const RunResult& r);

}  // namespace diagforge
