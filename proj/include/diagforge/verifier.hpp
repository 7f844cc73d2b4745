#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "diagforge/machine.hpp"
#include "diagforge/value.hpp"
#include "diagforge/verdict.hpp"

namespace diagforge {

enum class VerifierKind : std::uint8_t {
  BoundedSim,  // answers only from a witnessed halt or a cycle certificate
  Liar,        // simulates, then claims termination regardless of the outcome
  Stub,        // fixed behaviour, used to force each branch of a construction
};

/// A verifier plugin. Specs are plain immutable data; behaviour is a pure
/// function of the spec, the question and the random bits supplied.
struct VerifierSpec {
  std::string id;
  Task task = Task::InstanceHalting;
  std::uint64_t internal_budget = 10'000;
  bool randomized = false;
  bool claimed_safe = false;  // the trust assumption consumed by experiments
  VerifierKind kind = VerifierKind::Stub;

  // Stub behaviour: spend stub_steps, then answer stub_verdict with
  // probability stub_num/stub_den and DontKnow otherwise.
  Verdict stub_verdict = Verdict::DontKnow;
  std::uint64_t stub_num = 1;
  std::uint64_t stub_den = 1;
  std::uint64_t stub_steps = 1;
};

VerifierSpec make_bounded_sim_verifier(std::uint64_t budget, Task task = Task::InstanceHalting);
VerifierSpec make_liar_verifier(std::uint64_t inner_budget, Task task = Task::ProgVerification);
VerifierSpec make_abstaining_verifier(Task task);
/// Always answers `verdict` after `steps` steps.
VerifierSpec make_constant_verifier(Task task, Verdict verdict, std::uint64_t steps = 1);
/// Answers `verdict` with probability num/den, DontKnow otherwise.
VerifierSpec make_coin_verifier(Task task, Verdict verdict, std::uint64_t num, std::uint64_t den);

/// Parses the command-line verifier syntax:
///   bounded:<budget>  liar:<budget>  abstain
///   const:<verdict>[:<steps>]  coin:<num>/<den>:<verdict>
/// The spec id is the text itself.
VerifierSpec parse_verifier(std::string_view text, Task task);

class UnknownVerifier : public std::runtime_error {
 public:
  explicit UnknownVerifier(const std::string& id) : std::runtime_error("unknown verifier '" + id + "'") {}
};

/// Verifier registry addressed by id; also the oracle binding programs run
/// against.
class Registry final : public OracleBinding {
 public:
  Registry() = default;
  /// Registers a spec. Throws std::invalid_argument on duplicate ids or
  /// invalid parameters.
  const VerifierSpec& add(VerifierSpec spec);
  const VerifierSpec* find(std::string_view id) const;
  const VerifierSpec& at(std::string_view id) const;

  bool has(std::string_view id) const override { return find(id) != nullptr; }
  OracleReply ask(std::string_view id, std::span<const Value> args, std::uint64_t step_cap,
                  RandomSource& random) const override;
  bool check_trace(std::string_view id, const Value& program, const Value& trace) const override;

 private:
  std::map<std::string, VerifierSpec, std::less<>> specs_;
};

struct VerifierAnswer {
  Verdict verdict = Verdict::DontKnow;
  std::uint64_t steps_used = 0;
  std::shared_ptr<const Trace> trace;
  OracleReply::Status status = OracleReply::Status::Complete;
};

/// Asks `spec` about (p, input[, time_limit]) with a fresh generator seeded
/// by `seed`. time_limit is required iff the task is TimeBounded.
VerifierAnswer verify(const Registry& registry, const VerifierSpec& spec, const Program& p,
                      const Value& input, std::optional<std::uint64_t> time_limit, std::uint64_t seed);

/// Same, drawing from `random` and spending at most `step_cap` steps.
VerifierAnswer verify_with(const Registry& registry, const VerifierSpec& spec, const Program& p,
                           const Value& input, std::optional<std::uint64_t> time_limit,
                           RandomSource& random, std::uint64_t step_cap = kUnlimited);

/// True iff replaying the verifier on p with t's recorded draws reproduces
/// t's step hashes and final verdict. Never throws on malformed traces.
bool validate_trace(const Registry& registry, std::string_view verifier_id, const Program& p,
                    const Trace& t);

// ---------------------------------------------------------------------------
// Ground truth and audits

struct CorpusEntry {
  std::string id;
  Program program;
  Value input;
};

/// What a bounded, cycle-detecting run proves about one (program, input).
struct GroundTruth {
  enum class Status : std::uint8_t { Halts, Diverges, Undetermined };
  Status status = Status::Undetermined;
  HaltReport report;
  std::uint64_t draws = 0;
  bool reads_input = false;
};

GroundTruth certify(const Registry& registry, const Program& p, const Value& input,
                    std::uint64_t budget, std::uint64_t seed = 0,
                    OraclePolicy policy = OraclePolicy::Free);

/// Whether a claim is refuted by the certified ground truth. For
/// TimeBounded, `truth` must come from a run with fuel equal to the limit.
bool contradicts(Task task, Verdict claim, const GroundTruth& truth);

struct FalseClaim {
  std::string program_id;
  Verdict claimed = Verdict::DontKnow;
  GroundTruth truth;
};

struct SafetyAuditReport {
  std::size_t corpus_size = 0;
  std::size_t undetermined = 0;  // excluded: no certificate within budget
  std::vector<FalseClaim> false_claims;
  std::size_t abstentions = 0;

  bool empirically_safe() const { return false_claims.empty(); }
};

SafetyAuditReport audit_safety(const Registry& registry, const VerifierSpec& spec,
                               std::span<const CorpusEntry> corpus, std::uint64_t oracle_budget,
                               std::optional<std::uint64_t> time_limit = std::nullopt);

struct ProbabilityEstimate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double mean = 0.0;
  double lo = 0.0;  // 95% Wilson interval
  double hi = 0.0;
};

ProbabilityEstimate wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

/// Frequency with which `spec` answers `target`, over seeds seed_base + i.
ProbabilityEstimate estimate_answer_probability(const Registry& registry, const VerifierSpec& spec,
                                                const Program& p, const Value& input, Verdict target,
                                                std::uint64_t trials, std::uint64_t seed_base,
                                                std::optional<std::uint64_t> time_limit = std::nullopt);

}  // namespace diagforge
