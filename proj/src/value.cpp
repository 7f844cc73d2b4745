#include "diagforge/value.hpp"

#include <stdexcept>
#include <variant>

#include "diagforge/hash.hpp"
#include "diagforge/machine.hpp"
#include "diagforge/syntax.hpp"

namespace diagforge {

struct Value::Rep {
  Kind kind;
  std::variant<std::monostate, std::int64_t, std::string, Program, std::pair<Value, Value>,
               std::shared_ptr<const Trace>, Verdict, std::shared_ptr<const MachineState>>
      data;
  std::uint64_t hash;
};

namespace {

constexpr std::uint64_t kUnitHash = 0x0dd5eedULL;

std::uint64_t kind_seed(Value::Kind k) { return mix64(static_cast<std::uint64_t>(k) + 0x7a1e); }

}  // namespace

Value Value::integer(std::int64_t v) {
  return Value(std::make_shared<const Rep>(
      Rep{Kind::Int, v, hash_combine(kind_seed(Kind::Int), static_cast<std::uint64_t>(v))}));
}

Value Value::string(std::string s) {
  const std::uint64_t h = hash_combine(kind_seed(Kind::Str), hash_bytes(s));
  return Value(std::make_shared<const Rep>(Rep{Kind::Str, std::move(s), h}));
}

Value Value::program(Program p) {
  const std::uint64_t h = hash_combine(kind_seed(Kind::Program), p.hash());
  return Value(std::make_shared<const Rep>(Rep{Kind::Program, std::move(p), h}));
}

Value Value::pair(Value a, Value b) {
  const std::uint64_t h = hash_combine(hash_combine(kind_seed(Kind::Pair), a.hash()), b.hash());
  return Value(std::make_shared<const Rep>(Rep{Kind::Pair, std::make_pair(std::move(a), std::move(b)), h}));
}

Value Value::trace(std::shared_ptr<const Trace> t) {
  if (!t) throw std::invalid_argument("Value::trace: null trace");
  const std::uint64_t h = hash_combine(kind_seed(Kind::Trace), t->hash());
  return Value(std::make_shared<const Rep>(Rep{Kind::Trace, std::move(t), h}));
}

Value Value::verdict(Verdict v) {
  return Value(std::make_shared<const Rep>(
      Rep{Kind::Verdict, v, hash_combine(kind_seed(Kind::Verdict), static_cast<std::uint64_t>(v))}));
}

Value Value::fault(std::string what) {
  const std::uint64_t h = hash_combine(kind_seed(Kind::Fault), hash_bytes(what));
  return Value(std::make_shared<const Rep>(Rep{Kind::Fault, std::move(what), h}));
}

Value Value::config(std::shared_ptr<const MachineState> s) {
  if (!s) throw std::invalid_argument("Value::config: null state");
  const std::uint64_t h = hash_combine(kind_seed(Kind::Config), s->hash());
  return Value(std::make_shared<const Rep>(Rep{Kind::Config, std::move(s), h}));
}

Value::Kind Value::kind() const { return rep_ ? rep_->kind : Kind::Unit; }

namespace {
[[noreturn]] void wrong_kind(const char* want) {
  throw std::logic_error(std::string("value is not a ") + want);
}
}  // namespace

std::int64_t Value::as_int() const {
  if (kind() != Kind::Int) wrong_kind("int");
  return std::get<std::int64_t>(rep_->data);
}

const std::string& Value::as_str() const {
  if (kind() != Kind::Str && kind() != Kind::Fault) wrong_kind("string");
  return std::get<std::string>(rep_->data);
}

const Program& Value::as_program() const {
  if (kind() != Kind::Program) wrong_kind("program");
  return std::get<Program>(rep_->data);
}

const Value& Value::first() const {
  if (kind() != Kind::Pair) wrong_kind("pair");
  return std::get<std::pair<Value, Value>>(rep_->data).first;
}

const Value& Value::second() const {
  if (kind() != Kind::Pair) wrong_kind("pair");
  return std::get<std::pair<Value, Value>>(rep_->data).second;
}

const Trace& Value::as_trace() const { return *trace_ptr(); }

const std::shared_ptr<const Trace>& Value::trace_ptr() const {
  if (kind() != Kind::Trace) wrong_kind("trace");
  return std::get<std::shared_ptr<const Trace>>(rep_->data);
}

Verdict Value::as_verdict() const {
  if (kind() != Kind::Verdict) wrong_kind("verdict");
  return std::get<Verdict>(rep_->data);
}

const MachineState& Value::as_config() const { return *config_ptr(); }

const std::shared_ptr<const MachineState>& Value::config_ptr() const {
  if (kind() != Kind::Config) wrong_kind("config");
  return std::get<std::shared_ptr<const MachineState>>(rep_->data);
}

std::uint64_t Value::hash() const { return rep_ ? rep_->hash : kUnitHash; }

bool operator==(const Value& a, const Value& b) {
  if (a.rep_ == b.rep_) return true;
  if (a.kind() != b.kind() || a.hash() != b.hash()) return false;
  switch (a.kind()) {
    case Value::Kind::Unit:
      return true;
    case Value::Kind::Int:
      return a.as_int() == b.as_int();
    case Value::Kind::Str:
    case Value::Kind::Fault:
      return a.as_str() == b.as_str();
    case Value::Kind::Program:
      return a.as_program() == b.as_program();
    case Value::Kind::Pair:
      return a.first() == b.first() && a.second() == b.second();
    case Value::Kind::Trace:
      return a.as_trace() == b.as_trace();
    case Value::Kind::Verdict:
      return a.as_verdict() == b.as_verdict();
    case Value::Kind::Config:
      return same_state(a.as_config(), b.as_config());
  }
  return false;
}

Trace::Trace(std::string verifier_id, Program subject, Value input,
             std::optional<std::uint64_t> time_limit, std::vector<bool> random_draws,
             std::vector<std::uint64_t> step_hashes, Verdict final_verdict)
    : verifier_id_(std::move(verifier_id)),
      subject_(std::move(subject)),
      input_(std::move(input)),
      time_limit_(time_limit),
      random_draws_(std::move(random_draws)),
      step_hashes_(std::move(step_hashes)),
      final_verdict_(final_verdict) {
  std::uint64_t h = hash_bytes(verifier_id_);
  h = hash_combine(h, subject_.hash());
  h = hash_combine(h, input_.hash());
  h = hash_combine(h, time_limit_ ? *time_limit_ + 1 : 0);
  h = hash_combine(h, random_draws_.size());
  for (bool b : random_draws_) h = hash_combine(h, b ? 1 : 2);
  h = hash_combine(h, step_hashes_.size());
  for (auto s : step_hashes_) h = hash_combine(h, s);
  h = hash_combine(h, static_cast<std::uint64_t>(final_verdict_));
  hash_ = h;
}

bool operator==(const Trace& a, const Trace& b) {
  return a.hash_ == b.hash_ && a.verifier_id_ == b.verifier_id_ && a.final_verdict_ == b.final_verdict_ &&
         a.time_limit_ == b.time_limit_ && a.random_draws_ == b.random_draws_ &&
         a.step_hashes_ == b.step_hashes_ && a.subject_ == b.subject_ && a.input_ == b.input_;
}

bool matches(const Shape& shape, const Value& v) {
  switch (shape.kind()) {
    case Shape::Kind::Any: return true;
    case Shape::Kind::Unit: return v.is(Value::Kind::Unit);
    case Shape::Kind::Int: return v.is(Value::Kind::Int);
    case Shape::Kind::Str: return v.is(Value::Kind::Str);
    case Shape::Kind::Program: return v.is(Value::Kind::Program);
    case Shape::Kind::Trace: return v.is(Value::Kind::Trace);
    case Shape::Kind::Verdict: return v.is(Value::Kind::Verdict);
    case Shape::Kind::Pair:
      return v.is(Value::Kind::Pair) && matches(shape.first(), v.first()) &&
             matches(shape.second(), v.second());
  }
  return false;
}

Value default_value(const Shape& shape) {
  switch (shape.kind()) {
    case Shape::Kind::Any:
    case Shape::Kind::Unit: return Value();
    case Shape::Kind::Int: return Value::integer(0);
    case Shape::Kind::Str: return Value::string("");
    case Shape::Kind::Program: return Value::program(Program());
    case Shape::Kind::Trace:
      return Value::trace(std::make_shared<const Trace>("", Program(), Value(), std::nullopt,
                                                        std::vector<bool>{}, std::vector<std::uint64_t>{},
                                                        Verdict::DontKnow));
    case Shape::Kind::Verdict: return Value::verdict(Verdict::DontKnow);
    case Shape::Kind::Pair:
      return Value::pair(default_value(shape.first()), default_value(shape.second()));
  }
  return Value();
}

std::string to_text(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Unit: return "()";
    case Value::Kind::Int: return std::to_string(v.as_int());
    case Value::Kind::Str: return v.as_str();
    case Value::Kind::Program: return serialize(v.as_program());
    case Value::Kind::Pair: return "<" + to_text(v.first()) + ", " + to_text(v.second()) + ">";
    case Value::Kind::Trace:
      return "#trace<" + v.as_trace().verifier_id() + ":" +
             std::string(to_string(v.as_trace().final_verdict())) + ">";
    case Value::Kind::Verdict: return std::string(to_string(v.as_verdict()));
    case Value::Kind::Fault: return "#fault<" + v.as_str() + ">";
    case Value::Kind::Config: return "#config<" + std::to_string(v.as_config().steps) + ">";
  }
  return "";
}

}  // namespace diagforge
