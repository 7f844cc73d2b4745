#include "diagforge/verifier.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "diagforge/hash.hpp"

namespace diagforge {

namespace {

// Nested oracle calls (a verifier simulating a program that consults a
// verifier) recurse on the C++ stack. Past this depth the call is reported
// truncated and the enclosing simulation abstains.
constexpr int kMaxNesting = 192;
thread_local int g_nesting = 0;
thread_local bool g_nesting_hit = false;

std::uint64_t parse_count(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

std::pair<std::uint64_t, std::uint64_t> parse_ratio(std::string_view s) {
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) throw std::invalid_argument("expected num/den, got '" + std::string(s) + "'");
  const auto num = parse_count(s.substr(0, slash), "numerator");
  const auto den = parse_count(s.substr(slash + 1), "denominator");
  if (den == 0 || num > den) throw std::invalid_argument("probability must lie in [0, 1]");
  return {num, den};
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Records every bit handed out by an underlying source.
class Recording final : public RandomSource {
 public:
  explicit Recording(RandomSource& inner) : inner_(inner) {}
  std::optional<bool> bernoulli(std::uint64_t num, std::uint64_t den) override {
    auto b = inner_.bernoulli(num, den);
    if (b) bits.push_back(*b);
    return b;
  }
  std::vector<bool> bits;

 private:
  RandomSource& inner_;
};

struct Question {
  Program subject;
  Value input;
  std::optional<std::uint64_t> limit;
};

std::optional<Question> decode(Task task, std::span<const Value> args) {
  if (args.empty() || !args[0].is(Value::Kind::Program)) return std::nullopt;
  Question q{args[0].as_program(), Value(), std::nullopt};
  switch (task) {
    case Task::ProgVerification:
      if (args.size() > 2) return std::nullopt;
      if (args.size() == 2) q.input = args[1];
      return q;
    case Task::InstanceHalting:
    case Task::RandomizedHalting:
      if (args.size() != 2) return std::nullopt;
      q.input = args[1];
      return q;
    case Task::TimeBounded:
      if (args.size() != 3 || !args[2].is(Value::Kind::Int) || args[2].as_int() < 0) return std::nullopt;
      q.input = args[1];
      q.limit = static_cast<std::uint64_t>(args[2].as_int());
      return q;
  }
  return std::nullopt;
}

struct Outcome {
  OracleReply reply;
  std::vector<std::uint64_t> step_hashes;
};

std::uint64_t stub_hash(const VerifierSpec& spec, const Question& q, std::uint64_t i) {
  return hash_combine(hash_combine(hash_bytes(spec.id), q.subject.hash()), hash_combine(q.input.hash(), i));
}

// Optional abstention coin shared by stubs and the liar: true means answer.
std::optional<bool> answer_coin(const VerifierSpec& spec, RandomSource& random) {
  if (spec.stub_num >= spec.stub_den) return true;
  if (spec.stub_num == 0) return false;
  return random.bernoulli(spec.stub_num, spec.stub_den);
}

Outcome run_stub(const VerifierSpec& spec, const Question& q, std::uint64_t cap, RandomSource& random,
                 bool record) {
  Outcome out;
  if (spec.stub_steps > cap) {
    out.reply = {Verdict::DontKnow, cap, OracleReply::Status::Truncated};
    return out;
  }
  const auto coin = answer_coin(spec, random);
  if (!coin) {
    out.reply = {Verdict::DontKnow, 0, OracleReply::Status::NeedsRandomness};
    return out;
  }
  out.reply.steps_used = spec.stub_steps;
  out.reply.verdict = *coin ? spec.stub_verdict : Verdict::DontKnow;
  if (record) {
    for (std::uint64_t i = 0; i < spec.stub_steps; ++i) out.step_hashes.push_back(stub_hash(spec, q, i));
  }
  return out;
}

Outcome run_simulation(const Registry& registry, const VerifierSpec& spec, const Question& q,
                       std::uint64_t cap, RandomSource& random, bool record) {
  Outcome out;
  std::optional<bool> coin = true;
  if (spec.kind == VerifierKind::Liar) {
    coin = answer_coin(spec, random);
    if (!coin) {
      out.reply = {Verdict::DontKnow, 0, OracleReply::Status::NeedsRandomness};
      return out;
    }
  }

  std::uint64_t own = spec.internal_budget;
  if (q.limit) own = std::min(own, *q.limit);
  if (own == 0) {
    // Zero time allowed: nothing halts within it.
    out.reply.verdict = spec.kind == VerifierKind::Liar ? (*coin ? positive_verdict(spec.task) : Verdict::DontKnow)
                                                        : negative_verdict(spec.task);
    return out;
  }
  const std::uint64_t fuel = std::min(own, cap);
  if (fuel == 0) {
    out.reply = {Verdict::DontKnow, 0, OracleReply::Status::Truncated};
    return out;
  }
  // Subject input for program verification: a canonical inhabitant.
  const Value input = spec.task == Task::ProgVerification ? default_value(q.subject.input_shape()) : q.input;

  RunOptions options;
  options.detect_cycles = spec.kind == VerifierKind::BoundedSim;
  options.record_step_hashes = record;
  options.allow_randomness = false;

  const bool saved_hit = g_nesting_hit;
  g_nesting_hit = false;
  RunResult r;
  try {
    r = run(q.subject, input, Fuel{fuel, OraclePolicy::Metered}, 0, registry, options);
  } catch (const UnboundOracle&) {
    // Asking about a program that names an unknown verifier: abstain.
    g_nesting_hit = saved_hit || g_nesting_hit;
    out.reply = {Verdict::DontKnow, 0, OracleReply::Status::Complete};
    return out;
  }
  const bool nesting = g_nesting_hit;
  g_nesting_hit = saved_hit || nesting;

  out.reply.steps_used = std::min(r.report.steps, fuel);
  out.step_hashes = std::move(r.step_hashes);

  if (spec.kind == VerifierKind::Liar) {
    out.reply.verdict = *coin ? positive_verdict(spec.task) : Verdict::DontKnow;
    if (!r.report.halted() && fuel < own) out.reply.status = OracleReply::Status::Truncated;
    return out;
  }

  Verdict v = Verdict::DontKnow;
  const auto& rep = r.report;
  switch (spec.task) {
    case Task::ProgVerification:
      if (rep.halted() && !references_input(q.subject)) v = Verdict::WellBehaved;
      else if (rep.cycled()) v = Verdict::NotWellBehaved;
      break;
    case Task::InstanceHalting:
      if (rep.halted()) v = Verdict::Halts;
      else if (rep.cycled()) v = Verdict::DoesNotHalt;
      break;
    case Task::TimeBounded: {
      const bool limit_binds = fuel == *q.limit;
      if (rep.halted()) {
        v = Verdict::HaltsWithinT;
      } else if (rep.cycled()) {
        v = Verdict::DoesNotHaltWithinT;
      } else if (limit_binds && !nesting &&
                 (r.stop_reason == "fuel" || r.stop_reason == "oracle-truncated")) {
        // Spent the whole limit without halting: a witness by itself.
        v = Verdict::DoesNotHaltWithinT;
      }
      break;
    }
    case Task::RandomizedHalting:
      // Randomness is withheld, so a halt or cycle here is draw-free and
      // therefore holds for every random stream.
      if (rep.halted()) v = Verdict::AlwaysHalts;
      else if (rep.cycled()) v = Verdict::NeverHalts;
      break;
  }
  out.reply.verdict = v;
  if (v == Verdict::DontKnow && fuel < own && !rep.halted() && !rep.cycled()) {
    out.reply.status = OracleReply::Status::Truncated;
  }
  return out;
}

Outcome answer(const Registry& registry, const VerifierSpec& spec, const Question& q, std::uint64_t cap,
               RandomSource& random, bool record) {
  if (spec.kind == VerifierKind::Stub) return run_stub(spec, q, cap, random, record);
  return run_simulation(registry, spec, q, cap, random, record);
}

std::vector<Value> question_args(Task task, const Program& p, const Value& input,
                                 std::optional<std::uint64_t> limit) {
  std::vector<Value> args{Value::program(p), input};
  if (task == Task::TimeBounded) {
    if (!limit) throw std::invalid_argument("time-bounded verification needs a time limit");
    args.push_back(Value::integer(static_cast<std::int64_t>(*limit)));
  } else if (limit) {
    throw std::invalid_argument("time limit given for a task without one");
  }
  return args;
}

}  // namespace

// ---------------------------------------------------------------------------

VerifierSpec make_bounded_sim_verifier(std::uint64_t budget, Task task) {
  if (budget == 0) throw std::invalid_argument("verifier budget must be positive");
  VerifierSpec s;
  s.id = "bounded:" + std::to_string(budget);
  s.task = task;
  s.internal_budget = budget;
  s.claimed_safe = true;
  s.kind = VerifierKind::BoundedSim;
  return s;
}

VerifierSpec make_liar_verifier(std::uint64_t inner_budget, Task task) {
  if (inner_budget == 0) throw std::invalid_argument("verifier budget must be positive");
  VerifierSpec s;
  s.id = "liar:" + std::to_string(inner_budget);
  s.task = task;
  s.internal_budget = inner_budget;
  s.claimed_safe = true;  // mistaken trust
  s.kind = VerifierKind::Liar;
  return s;
}

VerifierSpec make_abstaining_verifier(Task task) {
  VerifierSpec s;
  s.id = "abstain";
  s.task = task;
  s.internal_budget = 1;
  s.claimed_safe = true;
  s.kind = VerifierKind::Stub;
  s.stub_verdict = Verdict::DontKnow;
  return s;
}

VerifierSpec make_constant_verifier(Task task, Verdict verdict, std::uint64_t steps) {
  if (!in_family(verdict, task)) throw std::invalid_argument("verdict outside the task family");
  if (steps == 0) throw std::invalid_argument("stub steps must be positive");
  VerifierSpec s;
  s.id = "const:" + std::string(to_string(verdict)) + ":" + std::to_string(steps);
  s.task = task;
  s.internal_budget = steps;
  s.kind = VerifierKind::Stub;
  s.stub_verdict = verdict;
  s.stub_steps = steps;
  return s;
}

VerifierSpec make_coin_verifier(Task task, Verdict verdict, std::uint64_t num, std::uint64_t den) {
  if (!in_family(verdict, task)) throw std::invalid_argument("verdict outside the task family");
  if (den == 0 || num > den) throw std::invalid_argument("probability must lie in [0, 1]");
  VerifierSpec s;
  s.id = "coin:" + std::to_string(num) + "/" + std::to_string(den) + ":" + std::string(to_string(verdict));
  s.task = task;
  s.internal_budget = 1;
  s.randomized = num > 0 && num < den;
  s.kind = VerifierKind::Stub;
  s.stub_verdict = verdict;
  s.stub_num = num;
  s.stub_den = den;
  return s;
}

VerifierSpec parse_verifier(std::string_view text, Task task) {
  const auto parts = split(text, ':');
  const auto& head = parts[0];
  VerifierSpec s;
  if (head == "bounded" && parts.size() == 2) {
    s = make_bounded_sim_verifier(parse_count(parts[1], "budget"), task);
  } else if (head == "liar" && (parts.size() == 2 || parts.size() == 3)) {
    s = make_liar_verifier(parse_count(parts[1], "budget"), task);
    if (parts.size() == 3) {
      std::tie(s.stub_num, s.stub_den) = parse_ratio(parts[2]);
      s.randomized = s.stub_num > 0 && s.stub_num < s.stub_den;
    }
  } else if (head == "abstain" && parts.size() == 1) {
    s = make_abstaining_verifier(task);
  } else if (head == "const" && (parts.size() == 2 || parts.size() == 3)) {
    const auto v = parse_verdict(parts[1]);
    if (!v) throw std::invalid_argument("unknown verdict '" + std::string(parts[1]) + "'");
    s = make_constant_verifier(task, *v, parts.size() == 3 ? parse_count(parts[2], "steps") : 1);
  } else if (head == "coin" && parts.size() == 3) {
    const auto [num, den] = parse_ratio(parts[1]);
    const auto v = parse_verdict(parts[2]);
    if (!v) throw std::invalid_argument("unknown verdict '" + std::string(parts[2]) + "'");
    s = make_coin_verifier(task, *v, num, den);
  } else {
    throw std::invalid_argument("unrecognized verifier '" + std::string(text) +
                                "' (expected bounded:N, liar:N[:p/q], abstain, const:V[:steps], coin:p/q:V)");
  }
  s.id = std::string(text);
  return s;
}

// ---------------------------------------------------------------------------

const VerifierSpec& Registry::add(VerifierSpec spec) {
  if (spec.id.empty()) throw std::invalid_argument("verifier id must be nonempty");
  if (spec.internal_budget == 0) throw std::invalid_argument("verifier budget must be positive");
  if (spec.kind == VerifierKind::Stub && spec.stub_steps > spec.internal_budget) {
    throw std::invalid_argument("stub steps exceed the internal budget");
  }
  if (spec.stub_den == 0 || spec.stub_num > spec.stub_den) {
    throw std::invalid_argument("probability must lie in [0, 1]");
  }
  auto [it, inserted] = specs_.emplace(spec.id, std::move(spec));
  if (!inserted) throw std::invalid_argument("duplicate verifier id '" + it->first + "'");
  return it->second;
}

const VerifierSpec* Registry::find(std::string_view id) const {
  auto it = specs_.find(id);
  return it == specs_.end() ? nullptr : &it->second;
}

const VerifierSpec& Registry::at(std::string_view id) const {
  if (const auto* s = find(id)) return *s;
  throw UnknownVerifier(std::string(id));
}

OracleReply Registry::ask(std::string_view id, std::span<const Value> args, std::uint64_t step_cap,
                          RandomSource& random) const {
  const VerifierSpec& spec = at(id);
  const auto q = decode(spec.task, args);
  if (!q) return {Verdict::DontKnow, 0, OracleReply::Status::BadArguments};
  if (g_nesting >= kMaxNesting) {
    g_nesting_hit = true;
    return {Verdict::DontKnow, 0, OracleReply::Status::Truncated};
  }
  ++g_nesting;
  struct Guard {
    ~Guard() { --g_nesting; }
  } guard;
  return answer(*this, spec, *q, step_cap, random, false).reply;
}

bool Registry::check_trace(std::string_view id, const Value& program, const Value& trace) const {
  if (!program.is(Value::Kind::Program) || !trace.is(Value::Kind::Trace)) return false;
  return validate_trace(*this, id, program.as_program(), trace.as_trace());
}

// ---------------------------------------------------------------------------

VerifierAnswer verify_with(const Registry& registry, const VerifierSpec& spec, const Program& p,
                           const Value& input, std::optional<std::uint64_t> time_limit,
                           RandomSource& random, std::uint64_t step_cap) {
  const auto args = question_args(spec.task, p, input, time_limit);
  const auto q = decode(spec.task, args);
  Recording rec(random);
  Outcome o = answer(registry, spec, *q, step_cap, rec, true);

  VerifierAnswer a;
  a.status = o.reply.status;
  a.verdict = o.reply.status == OracleReply::Status::Complete ? o.reply.verdict : Verdict::DontKnow;
  a.steps_used = std::min(o.reply.steps_used, spec.internal_budget);
  a.trace = std::make_shared<const Trace>(spec.id, p, input, time_limit, std::move(rec.bits),
                                          std::move(o.step_hashes), a.verdict);
  return a;
}

VerifierAnswer verify(const Registry& registry, const VerifierSpec& spec, const Program& p,
                      const Value& input, std::optional<std::uint64_t> time_limit, std::uint64_t seed) {
  SplitMix64 rng(seed);
  LiveRandom live(rng);
  return verify_with(registry, spec, p, input, time_limit, live);
}

bool validate_trace(const Registry& registry, std::string_view verifier_id, const Program& p,
                    const Trace& t) {
  try {
    const VerifierSpec* spec = registry.find(verifier_id);
    if (!spec || t.verifier_id() != verifier_id || !(t.subject() == p)) return false;
    if ((spec->task == Task::TimeBounded) != t.time_limit().has_value()) return false;
    // Replay cost is bounded by the verifier's own budget.
    if (t.step_hashes().size() > spec->internal_budget) return false;
    ReplayRandom replay(t.random_draws());
    const auto args = question_args(spec->task, p, t.input(), t.time_limit());
    const auto q = decode(spec->task, args);
    if (!q) return false;
    Outcome o = answer(registry, *spec, *q, kUnlimited, replay, true);
    if (replay.overran() || !replay.exhausted()) return false;
    if (o.reply.status != OracleReply::Status::Complete) return false;
    return o.reply.verdict == t.final_verdict() && o.step_hashes == t.step_hashes();
  } catch (const std::exception&) {
    return false;
  }
}

// ---------------------------------------------------------------------------

GroundTruth certify(const Registry& registry, const Program& p, const Value& input, std::uint64_t budget,
                    std::uint64_t seed, OraclePolicy policy) {
  GroundTruth g;
  g.reads_input = references_input(p);
  RunResult r = run(p, input, Fuel{budget, policy}, seed, registry);
  g.report = r.report;
  g.draws = r.draws;
  if (r.report.halted()) g.status = GroundTruth::Status::Halts;
  else if (r.report.cycled()) g.status = GroundTruth::Status::Diverges;
  return g;
}

bool contradicts(Task task, Verdict claim, const GroundTruth& truth) {
  using S = GroundTruth::Status;
  if (truth.status == S::Undetermined) return false;
  const bool halts = truth.status == S::Halts;
  const bool deterministic = truth.draws == 0;
  switch (task) {
    case Task::ProgVerification:
      if (claim == Verdict::WellBehaved) return !halts;  // diverges on this input
      if (claim == Verdict::NotWellBehaved) return halts && deterministic && !truth.reads_input;
      return false;
    case Task::InstanceHalting:
      if (!deterministic) return false;
      if (claim == Verdict::Halts) return !halts;
      if (claim == Verdict::DoesNotHalt) return halts;
      return false;
    case Task::TimeBounded:
      if (!deterministic) return false;
      if (claim == Verdict::HaltsWithinT) return !halts;
      if (claim == Verdict::DoesNotHaltWithinT) return halts;
      return false;
    case Task::RandomizedHalting:
      if (claim == Verdict::AlwaysHalts) return !halts;
      if (claim == Verdict::NeverHalts) return halts;
      if (claim == Verdict::HaltsOnSomeRandomness) return deterministic;
      return false;
  }
  return false;
}

SafetyAuditReport audit_safety(const Registry& registry, const VerifierSpec& spec,
                               std::span<const CorpusEntry> corpus, std::uint64_t oracle_budget,
                               std::optional<std::uint64_t> time_limit) {
  SafetyAuditReport rep;
  rep.corpus_size = corpus.size();
  for (const auto& e : corpus) {
    GroundTruth truth;
    if (spec.task == Task::TimeBounded) {
      const std::uint64_t t = *time_limit;
      // Ground truth at the limit itself: exhausting it is a witness.
      truth = certify(registry, e.program, e.input, std::max<std::uint64_t>(t, 1), 0, OraclePolicy::Metered);
      if (truth.status == GroundTruth::Status::Undetermined && t > 0 && t <= oracle_budget) {
        truth.status = GroundTruth::Status::Diverges;
      }
      if (t == 0) truth.status = GroundTruth::Status::Diverges;
    } else {
      truth = certify(registry, e.program, e.input, oracle_budget);
    }
    const bool usable = truth.status != GroundTruth::Status::Undetermined &&
                        (truth.draws == 0 || spec.task == Task::RandomizedHalting ||
                         spec.task == Task::ProgVerification);
    const auto ans = verify(registry, spec, e.program, e.input, time_limit, 0);
    if (ans.verdict == Verdict::DontKnow) ++rep.abstentions;
    if (!usable) {
      ++rep.undetermined;
      continue;
    }
    if (contradicts(spec.task, ans.verdict, truth)) rep.false_claims.push_back({e.id, ans.verdict, truth});
  }
  return rep;
}

ProbabilityEstimate wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  ProbabilityEstimate e;
  e.successes = successes;
  e.trials = trials;
  const double n = static_cast<double>(trials);
  const double ph = static_cast<double>(successes) / n;
  e.mean = ph;
  const double z2 = z * z;
  const double centre = (ph + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(ph * (1 - ph) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  e.lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  e.hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return e;
}

ProbabilityEstimate estimate_answer_probability(const Registry& registry, const VerifierSpec& spec,
                                                const Program& p, const Value& input, Verdict target,
                                                std::uint64_t trials, std::uint64_t seed_base,
                                                std::optional<std::uint64_t> time_limit) {
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    if (verify(registry, spec, p, input, time_limit, seed_base + i).verdict == target) ++hits;
  }
  return wilson_interval(hits, trials);
}

}  // namespace diagforge
