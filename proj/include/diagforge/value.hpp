#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "diagforge/ast.hpp"
#include "diagforge/verdict.hpp"

namespace diagforge {

class Trace;
struct MachineState;

/// Immutable runtime value with structural equality and a cached hash.
/// A default-constructed Value is the unit value.
class Value {
 public:
  enum class Kind : std::uint8_t { Unit, Int, Str, Program, Pair, Trace, Verdict, Fault, Config };

  Value() = default;

  static Value integer(std::int64_t v);
  static Value string(std::string s);
  static Value program(Program p);
  static Value pair(Value a, Value b);
  static Value trace(std::shared_ptr<const Trace> t);
  static Value verdict(Verdict v);
  /// Distinguished error value produced by a type fault.
  static Value fault(std::string what);
  /// An interpreter configuration, as used by the reductions.
  static Value config(std::shared_ptr<const MachineState> s);

  Kind kind() const;
  bool is(Kind k) const { return kind() == k; }

  std::int64_t as_int() const;
  /// Text of a Str or Fault value.
  const std::string& as_str() const;
  const Program& as_program() const;
  const Value& first() const;
  const Value& second() const;
  const Trace& as_trace() const;
  const std::shared_ptr<const Trace>& trace_ptr() const;
  Verdict as_verdict() const;
  const MachineState& as_config() const;
  const std::shared_ptr<const MachineState>& config_ptr() const;

  std::uint64_t hash() const;

  friend bool operator==(const Value& a, const Value& b);

 private:
  struct Rep;
  explicit Value(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

/// Replayable record of one verifier run.
class Trace {
 public:
  Trace(std::string verifier_id, Program subject, Value input, std::optional<std::uint64_t> time_limit,
        std::vector<bool> random_draws, std::vector<std::uint64_t> step_hashes, Verdict final_verdict);

  const std::string& verifier_id() const { return verifier_id_; }
  const Program& subject() const { return subject_; }
  const Value& input() const { return input_; }
  std::optional<std::uint64_t> time_limit() const { return time_limit_; }
  const std::vector<bool>& random_draws() const { return random_draws_; }
  const std::vector<std::uint64_t>& step_hashes() const { return step_hashes_; }
  Verdict final_verdict() const { return final_verdict_; }
  std::uint64_t hash() const { return hash_; }

  friend bool operator==(const Trace& a, const Trace& b);

 private:
  std::string verifier_id_;
  Program subject_;
  Value input_;
  std::optional<std::uint64_t> time_limit_;
  std::vector<bool> random_draws_;
  std::vector<std::uint64_t> step_hashes_;
  Verdict final_verdict_;
  std::uint64_t hash_ = 0;
};

/// Whether `v` fits the declared input shape.
bool matches(const Shape& shape, const Value& v);

/// A canonical inhabitant of `shape`.
Value default_value(const Shape& shape);

/// Display text; also what `concat` appends for non-string operands.
std::string to_text(const Value& v);

}  // namespace diagforge
