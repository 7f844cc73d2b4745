#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "diagforge/ast.hpp"
#include "diagforge/hash.hpp"
#include "diagforge/schedule.hpp"
#include "diagforge/value.hpp"
#include "diagforge/verdict.hpp"

namespace diagforge {

inline constexpr std::uint64_t kUnlimited = std::numeric_limits<std::uint64_t>::max();

/// How oracle calls are charged to the calling program.
enum class OraclePolicy : std::uint8_t {
  Metered,  // the verifier's own steps are added to the caller's count
  Free,     // an oracle call costs the one step of entering its node
};

struct Fuel {
  std::uint64_t max_steps = 1'000'000;
  OraclePolicy policy = OraclePolicy::Free;
};

// ---------------------------------------------------------------------------
// Randomness

class RandomSource {
 public:
  virtual ~RandomSource() = default;
  /// One Bernoulli(num/den) draw, or nullopt when no randomness is available.
  virtual std::optional<bool> bernoulli(std::uint64_t num, std::uint64_t den) = 0;
};

/// Draws from a live generator and records every bit.
class LiveRandom final : public RandomSource {
 public:
  explicit LiveRandom(SplitMix64& rng) : rng_(rng) {}
  std::optional<bool> bernoulli(std::uint64_t num, std::uint64_t den) override;
  const std::vector<bool>& drawn() const { return drawn_; }

 private:
  SplitMix64& rng_;
  std::vector<bool> drawn_;
};

/// Feeds back recorded bits. Asking past the end yields nullopt.
class ReplayRandom final : public RandomSource {
 public:
  explicit ReplayRandom(const std::vector<bool>& bits) : bits_(bits) {}
  std::optional<bool> bernoulli(std::uint64_t num, std::uint64_t den) override;
  bool exhausted() const { return pos_ == bits_.size(); }
  bool overran() const { return overran_; }

 private:
  const std::vector<bool>& bits_;
  std::size_t pos_ = 0;
  bool overran_ = false;
};

class NoRandom final : public RandomSource {
 public:
  std::optional<bool> bernoulli(std::uint64_t, std::uint64_t) override { return std::nullopt; }
};

// ---------------------------------------------------------------------------
// Oracle binding: how OracleCall / CheckTrace reach a verifier.

struct OracleReply {
  enum class Status : std::uint8_t {
    Complete,
    Truncated,        // the step cap ran out before the verifier finished
    NeedsRandomness,  // the verifier asked for a draw that was not available
    BadArguments,     // wrong argument count or kinds for the verifier's task
  };
  Verdict verdict = Verdict::DontKnow;
  std::uint64_t steps_used = 0;
  Status status = Status::Complete;
};

class OracleBinding {
 public:
  virtual ~OracleBinding() = default;
  virtual bool has(std::string_view id) const = 0;
  /// Runs the verifier for at most `step_cap` steps of its own budget.
  virtual OracleReply ask(std::string_view id, std::span<const Value> args, std::uint64_t step_cap,
                          RandomSource& random) const = 0;
  virtual bool check_trace(std::string_view id, const Value& program, const Value& trace) const = 0;
};

/// Binding with no verifiers at all.
class NoOracles final : public OracleBinding {
 public:
  bool has(std::string_view) const override { return false; }
  OracleReply ask(std::string_view id, std::span<const Value>, std::uint64_t,
                  RandomSource&) const override;
  bool check_trace(std::string_view id, const Value&, const Value&) const override;
};

class UnboundOracle : public std::runtime_error {
 public:
  explicit UnboundOracle(std::string id)
      : std::runtime_error("unbound oracle '" + id + "'"), id_(std::move(id)) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class ArityMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Machine configuration

/// Persistent name -> value bindings with a cached structural hash.
class Env {
 public:
  Env() = default;
  Env extend(std::string name, Value v) const;
  const Value* lookup(std::string_view name) const;
  std::uint64_t hash() const;
  friend bool operator==(const Env& a, const Env& b);

 private:
  struct Cell;
  explicit Env(std::shared_ptr<const Cell> head) : head_(std::move(head)) {}
  std::shared_ptr<const Cell> head_;
};

struct Frame;
using Kont = std::shared_ptr<const Frame>;

/// One continuation frame. Frames are immutable and form a persistent stack
/// whose hash is accumulated towards the top.
struct Frame {
  enum class Kind : std::uint8_t { Seq, Let, If, Loop, Args, Boundary, BestArm };

  Kind kind = Kind::Boundary;
  NodePtr node;
  Env env;
  std::vector<Value> values;  // evaluated arguments (Args)
  std::uint32_t index = 0;    // position in a Seq, or the arm being pulled
  EliminationSchedule schedule;
  Kont next;

  std::uint64_t hash = 0;
  std::uint32_t depth = 0;
  std::uint32_t eval_depth = 0;  // Boundary frames at or below this one

  static Kont push(Frame f, Kont next);
};

/// A complete interpreter configuration. Between transitions the machine is
/// always about to enter `control` (Running) or has stopped; oracle calls run
/// to completion inside a single transition, so no oracle frame is ever
/// pending at an observation point.
struct MachineState {
  enum class Mode : std::uint8_t { Running, Halted, Stuck };

  Mode mode = Mode::Running;
  NodePtr control;
  Env env;
  Kont kont;
  Value result;              // Halted
  std::string stuck_reason;  // Stuck: "pull-cap", "randomness-unavailable", "oracle-truncated"
  SplitMix64 rng;
  bool randomness = true;
  OraclePolicy policy = OraclePolicy::Free;

  // Counters; not part of the configuration's identity.
  std::uint64_t steps = 0;
  std::uint64_t transitions = 0;
  std::uint64_t draws = 0;

  /// Hash of (mode, control, env, continuation, rng); excludes counters.
  std::uint64_t hash() const;
  std::size_t eval_depth() const { return kont ? kont->eval_depth : 0; }
};

MachineState initial_state(const Program& p, const Value& input, std::uint64_t seed,
                           OraclePolicy policy, bool randomness = true);

/// Structural equality of configurations, counters excluded.
bool same_state(const MachineState& a, const MachineState& b);

struct StepInfo {
  std::uint64_t charged = 0;
  bool truncated = false;
};

/// One transition: enter one node, then feed values through continuation
/// frames until the next node entry or a stop. Costs one step plus, under
/// the Metered policy, the steps of any verifier consulted. `oracle_cap`
/// bounds what a metered verifier may spend.
StepInfo step(MachineState& s, const OracleBinding& oracles, std::uint64_t oracle_cap = kUnlimited);

// ---------------------------------------------------------------------------
// Runs

struct HaltReport {
  enum class Outcome : std::uint8_t { Halted, FuelExhausted, CycleCertificate };

  Outcome outcome = Outcome::FuelExhausted;
  Value value;                   // Halted
  std::uint64_t steps = 0;       // charged steps when the run stopped
  std::uint64_t prefix_len = 0;  // CycleCertificate: transitions before the first occurrence
  std::uint64_t cycle_len = 0;   // CycleCertificate: transitions until it recurs

  bool halted() const { return outcome == Outcome::Halted; }
  bool cycled() const { return outcome == Outcome::CycleCertificate; }
  bool fault() const { return halted() && value.is(Value::Kind::Fault); }
};

struct RunOptions {
  bool detect_cycles = true;
  std::size_t cycle_table_cap = std::size_t{1} << 18;
  bool record_step_hashes = false;
  bool allow_randomness = true;
};

struct RunResult {
  HaltReport report;
  std::vector<std::uint64_t> step_hashes;  // state hash after every transition
  std::uint64_t transitions = 0;
  std::uint64_t draws = 0;
  std::size_t eval_depth = 0;
  std::size_t max_eval_depth = 0;
  /// Why a FuelExhausted run stopped: "fuel", "pull-cap",
  /// "randomness-unavailable" or "oracle-truncated".
  std::string stop_reason;
  bool cycle_table_saturated = false;
};

/// Runs `p` on `input`. Deterministic in all arguments. Throws UnboundOracle
/// if the program names a verifier the binding does not know.
RunResult run(const Program& p, const Value& input, const Fuel& fuel, std::uint64_t seed,
              const OracleBinding& oracles, const RunOptions& options = {});

/// Continues from an explicit configuration; its counters keep accumulating.
RunResult run_from(MachineState start, const Fuel& fuel, const OracleBinding& oracles,
                   const RunOptions& options = {});

/// Everything needed to re-check a non-halting claim without trusting the
/// run that produced it.
struct CycleCertificate {
  Program program;
  Value input;
  std::uint64_t seed = 0;
  OraclePolicy policy = OraclePolicy::Free;
  std::uint64_t prefix_len = 0;
  std::uint64_t cycle_len = 0;
};

/// Replays prefix_len transitions, snapshots, replays cycle_len more and
/// checks the configuration recurred with no random draw in between.
bool verify_cycle_certificate(const CycleCertificate& cert, const OracleBinding& oracles);

/// (p, quoted p): the instance "p run on its own source".
std::pair<Program, Value> apply_self(const Program& p);

}  // namespace diagforge
