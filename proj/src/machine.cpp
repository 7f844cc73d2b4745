#include "diagforge/machine.hpp"

#include <algorithm>
#include <unordered_map>
#include <variant>

#include "diagforge/syntax.hpp"

namespace diagforge {

// ---------------------------------------------------------------------------
// Randomness

std::optional<bool> LiveRandom::bernoulli(std::uint64_t num, std::uint64_t den) {
  const bool bit = rng_.bernoulli(num, den);
  drawn_.push_back(bit);
  return bit;
}

std::optional<bool> ReplayRandom::bernoulli(std::uint64_t, std::uint64_t) {
  if (pos_ >= bits_.size()) {
    overran_ = true;
    return std::nullopt;
  }
  return bits_[pos_++];
}

OracleReply NoOracles::ask(std::string_view id, std::span<const Value>, std::uint64_t,
                           RandomSource&) const {
  throw UnboundOracle(std::string(id));
}

bool NoOracles::check_trace(std::string_view id, const Value&, const Value&) const {
  throw UnboundOracle(std::string(id));
}

// ---------------------------------------------------------------------------
// Env

struct Env::Cell {
  std::string name;
  Value value;
  std::shared_ptr<const Cell> next;
  std::uint64_t hash;
};

namespace {
constexpr std::uint64_t kEmptyEnvHash = 0xe0e0e0e0ULL;
constexpr std::uint64_t kEmptyKontHash = 0x4b4b4b4bULL;
}  // namespace

Env Env::extend(std::string name, Value v) const {
  std::uint64_t h = hash_combine(hash(), hash_bytes(name));
  h = hash_combine(h, v.hash());
  return Env(std::make_shared<const Cell>(Cell{std::move(name), std::move(v), head_, h}));
}

const Value* Env::lookup(std::string_view name) const {
  for (const Cell* c = head_.get(); c != nullptr; c = c->next.get()) {
    if (c->name == name) return &c->value;
  }
  return nullptr;
}

std::uint64_t Env::hash() const { return head_ ? head_->hash : kEmptyEnvHash; }

bool operator==(const Env& a, const Env& b) {
  const Env::Cell* x = a.head_.get();
  const Env::Cell* y = b.head_.get();
  while (x != y) {
    if (x == nullptr || y == nullptr) return false;
    if (x->hash != y->hash || x->name != y->name || !(x->value == y->value)) return false;
    x = x->next.get();
    y = y->next.get();
  }
  return true;
}

// ---------------------------------------------------------------------------
// Frames

Kont Frame::push(Frame f, Kont next) {
  std::uint64_t h = hash_combine(mix64(static_cast<std::uint64_t>(f.kind) + 0xf4a3e),
                                 f.node ? f.node->hash() : 0);
  h = hash_combine(h, f.env.hash());
  h = hash_combine(h, f.index);
  h = hash_combine(h, f.values.size());
  for (const auto& v : f.values) h = hash_combine(h, v.hash());
  if (f.kind == Kind::BestArm) h = hash_combine(h, f.schedule.hash());
  h = hash_combine(h, next ? next->hash : kEmptyKontHash);
  f.hash = h;
  f.depth = next ? next->depth + 1 : 1;
  f.eval_depth = (next ? next->eval_depth : 0) + (f.kind == Kind::Boundary ? 1 : 0);
  f.next = std::move(next);
  return std::make_shared<const Frame>(std::move(f));
}

namespace {

bool same_frame_content(const Frame& a, const Frame& b) {
  if (a.kind != b.kind || a.index != b.index || a.values.size() != b.values.size()) return false;
  if ((a.node == nullptr) != (b.node == nullptr)) return false;
  if (a.node && !same_node(*a.node, *b.node)) return false;
  if (!(a.env == b.env)) return false;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (!(a.values[i] == b.values[i])) return false;
  }
  return a.kind != Frame::Kind::BestArm || a.schedule == b.schedule;
}

bool same_kont(const Kont& a, const Kont& b) {
  const Frame* x = a.get();
  const Frame* y = b.get();
  while (x != y) {
    if (x == nullptr || y == nullptr) return false;
    if (x->hash != y->hash || x->depth != y->depth || !same_frame_content(*x, *y)) return false;
    x = x->next.get();
    y = y->next.get();
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// State

std::uint64_t MachineState::hash() const {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(mode) + 0x57a7e);
  switch (mode) {
    case Mode::Running:
      h = hash_combine(h, control->hash());
      h = hash_combine(h, env.hash());
      h = hash_combine(h, kont ? kont->hash : kEmptyKontHash);
      break;
    case Mode::Halted:
      h = hash_combine(h, result.hash());
      break;
    case Mode::Stuck:
      h = hash_combine(h, hash_bytes(stuck_reason));
      break;
  }
  h = hash_combine(h, randomness ? rng.state() : 0);
  h = hash_combine(h, randomness ? 1 : 0);
  h = hash_combine(h, static_cast<std::uint64_t>(policy));
  return h;
}

bool same_state(const MachineState& a, const MachineState& b) {
  if (a.mode != b.mode || a.randomness != b.randomness || a.policy != b.policy) return false;
  if (a.randomness && !(a.rng == b.rng)) return false;
  switch (a.mode) {
    case MachineState::Mode::Running:
      return same_node(*a.control, *b.control) && a.env == b.env && same_kont(a.kont, b.kont);
    case MachineState::Mode::Halted:
      return a.result == b.result;
    case MachineState::Mode::Stuck:
      return a.stuck_reason == b.stuck_reason;
  }
  return false;
}

MachineState initial_state(const Program& p, const Value& input, std::uint64_t seed,
                           OraclePolicy policy, bool randomness) {
  MachineState s;
  s.control = p.root_ptr();
  s.env = Env().extend(kInputVar, input);
  s.rng = SplitMix64(seed);
  s.randomness = randomness;
  s.policy = policy;
  return s;
}

// ---------------------------------------------------------------------------
// Transitions

namespace {

struct Enter {
  NodePtr node;
  Env env;
  Kont kont;
};
struct Feed {
  Value value;
  Kont kont;
};
struct Halt {
  Value value;
};
struct Stop {
  std::string reason;
};
using Control = std::variant<Enter, Feed, Halt, Stop>;

class Transition {
 public:
  Transition(MachineState& s, const OracleBinding& oracles, std::uint64_t cap)
      : s_(s), oracles_(oracles), cap_(cap) {}

  StepInfo run() {
    s_.steps += 1;
    s_.transitions += 1;
    info_.charged = 1;
    Control c = enter(s_.control, s_.env, s_.kont);
    while (auto* f = std::get_if<Feed>(&c)) {
      Feed feed = std::move(*f);
      c = apply(std::move(feed.value), std::move(feed.kont));
    }
    if (auto* e = std::get_if<Enter>(&c)) {
      s_.control = std::move(e->node);
      s_.env = std::move(e->env);
      s_.kont = std::move(e->kont);
    } else if (auto* h = std::get_if<Halt>(&c)) {
      s_.mode = MachineState::Mode::Halted;
      s_.result = std::move(h->value);
      clear_control();
    } else {
      s_.mode = MachineState::Mode::Stuck;
      s_.stuck_reason = std::get<Stop>(c).reason;
      clear_control();
    }
    return info_;
  }

 private:
  void clear_control() {
    s_.control.reset();
    s_.env = Env();
    s_.kont.reset();
  }

  static Halt fault(const Node& at, const std::string& what) {
    return Halt{Value::fault(what + " at " + kind_name(at))};
  }

  static std::string kind_name(const Node& n) {
    switch (n.kind()) {
      case NodeKind::Pair: return "pair";
      case NodeKind::Concat: return "concat";
      case NodeKind::If: return "if";
      case NodeKind::Eval: return "eval";
      case NodeKind::OracleCall: return "oracle";
      case NodeKind::TraceFinalVerdict: return "trace-final-verdict";
      case NodeKind::First: return "fst";
      case NodeKind::Second: return "snd";
      case NodeKind::Less: return "lt";
      case NodeKind::BestArm: return "best-arm";
      case NodeKind::Var: return "var";
      case NodeKind::ConfigStep: return "config-step";
      case NodeKind::ConfigHalted: return "config-halted";
      case NodeKind::ConfigSteps: return "config-steps";
      default: return "node";
    }
  }

  Control enter(const NodePtr& node, const Env& env, const Kont& k) {
    const Node& n = *node;
    switch (n.kind()) {
      case NodeKind::IntLit:
        return Feed{Value::integer(n.int_value()), k};
      case NodeKind::StrLit:
        return Feed{Value::string(n.text()), k};
      case NodeKind::Quote:
        return Feed{Value::program(n.quoted()), k};
      case NodeKind::VerdictLit:
        return Feed{Value::verdict(n.verdict()), k};
      case NodeKind::Var: {
        const Value* v = env.lookup(n.text());
        if (v == nullptr) return fault(n, "unbound variable '" + n.text() + "'");
        return Feed{*v, k};
      }
      case NodeKind::Seq:
        if (n.children().empty()) return Feed{Value(), k};
        return Enter{n.children()[0], env, Frame::push(Frame{Frame::Kind::Seq, node, env, {}, 0}, k)};
      case NodeKind::Let:
        return Enter{n.children()[0], env, Frame::push(Frame{Frame::Kind::Let, node, env}, k)};
      case NodeKind::If:
        return Enter{n.children()[0], env, Frame::push(Frame{Frame::Kind::If, node, env}, k)};
      case NodeKind::WhileTrue:
        return Enter{n.children()[0], env, Frame::push(Frame{Frame::Kind::Loop, node, env}, k)};
      case NodeKind::BernoulliDraw: {
        if (!s_.randomness) return Stop{"randomness-unavailable"};
        const bool bit = s_.rng.bernoulli(n.param(0), n.param(1));
        s_.draws += 1;
        return Feed{Value::integer(bit ? 1 : 0), k};
      }
      case NodeKind::BestArm: {
        EliminationSchedule sched(n.param(0), n.param(1), n.param(2));
        return next_pull(node, env, sched, k);
      }
      default:
        if (n.children().empty()) return primitive(node, {}, k);
        return Enter{n.children()[0], env, Frame::push(Frame{Frame::Kind::Args, node, env}, k)};
    }
  }

  Control next_pull(const NodePtr& node, const Env& env, EliminationSchedule sched, const Kont& k) {
    switch (sched.next()) {
      case EliminationSchedule::Action::PullArm1:
        return pull(node, env, sched, 1, k);
      case EliminationSchedule::Action::PullArm2:
        return pull(node, env, sched, 2, k);
      case EliminationSchedule::Action::Arm1Wins:
        return Feed{Value::integer(1), k};
      case EliminationSchedule::Action::Arm2Wins:
        return Feed{Value::integer(2), k};
      case EliminationSchedule::Action::CapExceeded:
        return Stop{"pull-cap"};
    }
    return Stop{"pull-cap"};
  }

  static Control pull(const NodePtr& node, const Env& env, const EliminationSchedule& sched,
                      std::uint32_t arm, const Kont& k) {
    Frame f{Frame::Kind::BestArm, node, env, {}, arm};
    f.schedule = sched;
    return Enter{node->children()[arm - 1], env, Frame::push(std::move(f), k)};
  }

  Control apply(Value v, Kont k) {
    if (!k) return Halt{std::move(v)};
    const Frame& f = *k;
    const Node& n = *f.node;
    switch (f.kind) {
      case Frame::Kind::Seq: {
        const std::uint32_t next = f.index + 1;
        if (next < n.children().size()) {
          return Enter{n.children()[next], f.env,
                       Frame::push(Frame{Frame::Kind::Seq, f.node, f.env, {}, next}, f.next)};
        }
        return Feed{std::move(v), f.next};
      }
      case Frame::Kind::Let:
        return Enter{n.children()[1], f.env.extend(n.text(), std::move(v)), f.next};
      case Frame::Kind::If: {
        if (!v.is(Value::Kind::Int)) return fault(n, "non-integer condition");
        return Enter{n.children()[v.as_int() != 0 ? 1 : 2], f.env, f.next};
      }
      case Frame::Kind::Loop:
        return Enter{n.children()[0], f.env, k};
      case Frame::Kind::Boundary:
        return Feed{std::move(v), f.next};
      case Frame::Kind::BestArm: {
        if (!v.is(Value::Kind::Int) || (v.as_int() != 0 && v.as_int() != 1)) {
          return fault(n, "arm reward must be 0 or 1");
        }
        EliminationSchedule sched = f.schedule;
        sched.record(static_cast<int>(f.index), v.as_int() == 1);
        return next_pull(f.node, f.env, sched, f.next);
      }
      case Frame::Kind::Args: {
        std::vector<Value> values = f.values;
        values.push_back(std::move(v));
        if (values.size() < n.children().size()) {
          const std::size_t i = values.size();
          Frame next{Frame::Kind::Args, f.node, f.env, std::move(values)};
          return Enter{n.children()[i], f.env, Frame::push(std::move(next), f.next)};
        }
        return primitive(f.node, std::move(values), f.next);
      }
    }
    return Stop{"corrupt-frame"};
  }

  Control primitive(const NodePtr& node, std::vector<Value> args, const Kont& k) {
    const Node& n = *node;
    switch (n.kind()) {
      case NodeKind::Pair:
        return Feed{Value::pair(std::move(args[0]), std::move(args[1])), k};
      case NodeKind::Concat:
        return Feed{Value::string(to_text(args[0]) + to_text(args[1])), k};
      case NodeKind::Return: {
        const Frame* f = k.get();
        while (f != nullptr && f->kind != Frame::Kind::Boundary) f = f->next.get();
        if (f == nullptr) return Halt{std::move(args[0])};
        return Feed{std::move(args[0]), f->next};
      }
      case NodeKind::Eval: {
        if (!args[0].is(Value::Kind::Program)) return fault(n, "eval of a non-program");
        const Program& p = args[0].as_program();
        if (!matches(p.input_shape(), args[1])) return fault(n, "input does not fit program shape");
        return Enter{p.root_ptr(), Env().extend(kInputVar, std::move(args[1])),
                     Frame::push(Frame{Frame::Kind::Boundary}, k)};
      }
      case NodeKind::OracleCall:
        return oracle_call(n, args, k);
      case NodeKind::TraceFinalVerdict:
        if (!args[0].is(Value::Kind::Trace)) return fault(n, "not a trace");
        return Feed{Value::verdict(args[0].as_trace().final_verdict()), k};
      case NodeKind::CheckTrace: {
        if (!oracles_.has(n.text())) throw UnboundOracle(n.text());
        const bool ok = oracles_.check_trace(n.text(), args[0], args[1]);
        return Feed{Value::integer(ok ? 1 : 0), k};
      }
      case NodeKind::TypeCheckInput: {
        const bool ok = args[0].is(Value::Kind::Program) && matches(args[0].as_program().input_shape(), args[1]);
        return Feed{Value::integer(ok ? 1 : 0), k};
      }
      case NodeKind::First:
        if (!args[0].is(Value::Kind::Pair)) return fault(n, "projection of a non-pair");
        return Feed{args[0].first(), k};
      case NodeKind::Second:
        if (!args[0].is(Value::Kind::Pair)) return fault(n, "projection of a non-pair");
        return Feed{args[0].second(), k};
      case NodeKind::Equal:
        return Feed{Value::integer(args[0] == args[1] ? 1 : 0), k};
      case NodeKind::Less:
        if (!args[0].is(Value::Kind::Int) || !args[1].is(Value::Kind::Int)) {
          return fault(n, "comparison of non-integers");
        }
        return Feed{Value::integer(args[0].as_int() < args[1].as_int() ? 1 : 0), k};
      case NodeKind::ConfigStep: {
        if (!args[0].is(Value::Kind::Config)) return fault(n, "not a configuration");
        const MachineState& c = args[0].as_config();
        if (c.mode != MachineState::Mode::Running) return Feed{Value::string("not-allowed"), k};
        auto next = std::make_shared<MachineState>(c);
        step(*next, oracles_);
        return Feed{Value::config(std::move(next)), k};
      }
      case NodeKind::ConfigHalted:
        if (!args[0].is(Value::Kind::Config)) return fault(n, "not a configuration");
        return Feed{Value::integer(args[0].as_config().mode == MachineState::Mode::Halted ? 1 : 0), k};
      case NodeKind::ConfigSteps:
        if (!args[0].is(Value::Kind::Config)) return fault(n, "not a configuration");
        return Feed{Value::integer(static_cast<std::int64_t>(args[0].as_config().steps)), k};
      default:
        return Stop{"corrupt-node"};
    }
  }

  Control oracle_call(const Node& n, const std::vector<Value>& args, const Kont& k) {
    if (!oracles_.has(n.text())) throw UnboundOracle(n.text());
    const bool metered = s_.policy == OraclePolicy::Metered;
    const std::uint64_t cap = metered ? remaining_cap() : kUnlimited;
    OracleReply reply;
    if (s_.randomness) {
      LiveRandom live(s_.rng);
      reply = oracles_.ask(n.text(), args, cap, live);
      s_.draws += live.drawn().size();
    } else {
      NoRandom none;
      reply = oracles_.ask(n.text(), args, cap, none);
    }
    switch (reply.status) {
      case OracleReply::Status::Complete:
        break;
      case OracleReply::Status::Truncated:
        info_.truncated = true;
        if (metered) {
          s_.steps += reply.steps_used;
          info_.charged += reply.steps_used;
        }
        return Stop{"oracle-truncated"};
      case OracleReply::Status::NeedsRandomness:
        return Stop{"randomness-unavailable"};
      case OracleReply::Status::BadArguments:
        return fault(n, "bad oracle arguments");
    }
    if (metered) {
      s_.steps += reply.steps_used;
      info_.charged += reply.steps_used;
    }
    return Feed{Value::verdict(reply.verdict), k};
  }

  std::uint64_t remaining_cap() const {
    if (cap_ == kUnlimited) return kUnlimited;
    const std::uint64_t spent = info_.charged - 1;
    return cap_ > spent ? cap_ - spent : 0;
  }

  MachineState& s_;
  const OracleBinding& oracles_;
  std::uint64_t cap_;
  StepInfo info_;
};

}  // namespace

StepInfo step(MachineState& s, const OracleBinding& oracles, std::uint64_t oracle_cap) {
  if (s.mode != MachineState::Mode::Running) return {};
  return Transition(s, oracles, oracle_cap).run();
}

// ---------------------------------------------------------------------------
// Runs

namespace {

struct Seen {
  std::uint64_t transitions;
  std::uint64_t draws;
  MachineState state;
};

void check_bindings(const Program& p, const Value& input, const OracleBinding& oracles) {
  for (const auto& id : verifier_ids(p)) {
    if (!oracles.has(id)) throw UnboundOracle(id);
  }
  if (input.is(Value::Kind::Program)) check_bindings(input.as_program(), Value(), oracles);
  if (input.is(Value::Kind::Pair)) {
    check_bindings(Program(), input.first(), oracles);
    check_bindings(Program(), input.second(), oracles);
  }
}

}  // namespace

RunResult run(const Program& p, const Value& input, const Fuel& fuel, std::uint64_t seed,
              const OracleBinding& oracles, const RunOptions& options) {
  check_bindings(p, input, oracles);
  return run_from(initial_state(p, input, seed, fuel.policy, options.allow_randomness), fuel, oracles,
                  options);
}

RunResult run_from(MachineState s, const Fuel& fuel, const OracleBinding& oracles,
                   const RunOptions& options) {
  if (fuel.max_steps == 0) throw std::invalid_argument("fuel must be positive");
  RunResult out;
  std::unordered_map<std::uint64_t, std::vector<Seen>> seen;
  std::size_t recorded = 0;
  const std::uint64_t start_transitions = s.transitions;
  const std::uint64_t start_draws = s.draws;
  const std::uint64_t start_steps = s.steps;

  auto finish = [&](HaltReport report) {
    out.report = std::move(report);
    out.transitions = s.transitions - start_transitions;
    out.draws = s.draws - start_draws;
    out.eval_depth = s.eval_depth();
    return out;
  };

  auto observe = [&]() -> std::optional<HaltReport> {
    if (!options.detect_cycles || s.mode != MachineState::Mode::Running) return std::nullopt;
    const std::uint64_t h = s.hash();
    auto& bucket = seen[h];
    for (const Seen& prior : bucket) {
      if (prior.draws == s.draws && same_state(prior.state, s)) {
        HaltReport r;
        r.outcome = HaltReport::Outcome::CycleCertificate;
        r.steps = s.steps - start_steps;
        r.prefix_len = prior.transitions - start_transitions;
        r.cycle_len = s.transitions - prior.transitions;
        return r;
      }
    }
    if (recorded < options.cycle_table_cap) {
      bucket.push_back(Seen{s.transitions, s.draws, s});
      ++recorded;
    } else {
      out.cycle_table_saturated = true;
    }
    return std::nullopt;
  };

  if (auto cert = observe()) return finish(*cert);
  while (true) {
    if (s.mode == MachineState::Mode::Halted) {
      HaltReport r;
      r.outcome = HaltReport::Outcome::Halted;
      r.value = s.result;
      r.steps = s.steps - start_steps;
      return finish(r);
    }
    if (s.mode == MachineState::Mode::Stuck) {
      out.stop_reason = s.stuck_reason;
      HaltReport r;
      r.outcome = HaltReport::Outcome::FuelExhausted;
      r.steps = s.steps - start_steps;
      return finish(r);
    }
    const std::uint64_t used = s.steps - start_steps;
    if (used >= fuel.max_steps) {
      out.stop_reason = "fuel";
      HaltReport r;
      r.outcome = HaltReport::Outcome::FuelExhausted;
      r.steps = used;
      return finish(r);
    }
    const std::uint64_t cap = fuel.max_steps - used - 1;
    const StepInfo info = step(s, oracles, cap);
    if (info.truncated) {
      // The verifier needed more than the remaining fuel.
      s.steps = start_steps + fuel.max_steps;
    }
    if (options.record_step_hashes) out.step_hashes.push_back(s.hash());
    out.max_eval_depth = std::max(out.max_eval_depth, s.eval_depth());
    if (auto cert = observe()) return finish(*cert);
  }
}

bool verify_cycle_certificate(const CycleCertificate& cert, const OracleBinding& oracles) {
  if (cert.cycle_len == 0) return false;
  MachineState s = initial_state(cert.program, cert.input, cert.seed, cert.policy);
  for (std::uint64_t i = 0; i < cert.prefix_len; ++i) {
    if (s.mode != MachineState::Mode::Running) return false;
    step(s, oracles);
  }
  if (s.mode != MachineState::Mode::Running) return false;
  const MachineState first = s;
  for (std::uint64_t i = 0; i < cert.cycle_len; ++i) {
    if (s.mode != MachineState::Mode::Running) return false;
    step(s, oracles);
  }
  return s.mode == MachineState::Mode::Running && s.draws == first.draws && same_state(first, s);
}

std::pair<Program, Value> apply_self(const Program& p) {
  if (!matches(p.input_shape(), Value::program(p))) {
    throw ArityMismatch("input shape " + serialize(p.input_shape()) + " cannot receive a program value");
  }
  return {p, Value::program(p)};
}

}  // namespace diagforge
