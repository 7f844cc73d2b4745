#include <doctest.h>

#include "diagforge/corpus.hpp"
#include "diagforge/syntax.hpp"
#include "diagforge/verifier.hpp"
#include "oracles.hpp"

using namespace diagforge;

namespace {

const char* const kFiveSteps = "(seq (int 1) (pair (int 2) (int 3)))";
const char* const kLoop = "(while-true (seq))";

VerifierAnswer ask(const VerifierSpec& spec, std::string_view src, std::optional<std::uint64_t> T = std::nullopt,
                   std::uint64_t seed = 0) {
  Registry reg;
  reg.add(spec);
  return verify(reg, spec, parse(src), Value(), T, seed);
}

}  // namespace

TEST_CASE("five-step program really takes five steps") {
  REQUIRE(oracle::straight_line_steps(kFiveSteps) == 5);
}

TEST_CASE("bounded simulation answers only what it witnessed") {
  CHECK(ask(make_bounded_sim_verifier(10'000), "(return (int 0))").verdict == Verdict::Halts);
  CHECK(ask(make_bounded_sim_verifier(10'000, Task::ProgVerification), "(return (int 0))").verdict ==
        Verdict::WellBehaved);
  CHECK(ask(make_bounded_sim_verifier(10'000), kLoop).verdict == Verdict::DoesNotHalt);
  CHECK(ask(make_bounded_sim_verifier(10'000, Task::ProgVerification), kLoop).verdict == Verdict::NotWellBehaved);
  CHECK(ask(make_bounded_sim_verifier(100), kFiveSteps).verdict == Verdict::Halts);
  const VerifierAnswer low = ask(make_bounded_sim_verifier(3), kFiveSteps);
  CHECK(low.verdict == Verdict::DontKnow);
  CHECK(low.steps_used == 3);
  CHECK(ask(make_bounded_sim_verifier(5), kFiveSteps).verdict == Verdict::Halts);
  CHECK(ask(make_bounded_sim_verifier(4), kFiveSteps).verdict == Verdict::DontKnow);
  // Reads its input: termination on every input is not witnessed by one run.
  CHECK(ask(make_bounded_sim_verifier(100, Task::ProgVerification), "(program int (return (var x)))").verdict ==
        Verdict::DontKnow);
  // Coin programs cannot be simulated without randomness.
  CHECK(ask(make_bounded_sim_verifier(100), "(if (bernoulli 1 2) (int 1) (int 2))").verdict == Verdict::DontKnow);
}

TEST_CASE("bounded simulation with a time limit") {
  const auto spec = make_bounded_sim_verifier(10'000, Task::TimeBounded);
  CHECK(ask(spec, kFiveSteps, 10).verdict == Verdict::HaltsWithinT);
  CHECK(ask(spec, kFiveSteps, 5).verdict == Verdict::HaltsWithinT);
  CHECK(ask(spec, kFiveSteps, 4).verdict == Verdict::DoesNotHaltWithinT);
  CHECK(ask(make_bounded_sim_verifier(3, Task::TimeBounded), kFiveSteps, 4).verdict == Verdict::DontKnow);
  CHECK(ask(spec, kLoop, 100).verdict == Verdict::DoesNotHaltWithinT);
}

TEST_CASE("liar and stubs") {
  CHECK(ask(make_liar_verifier(100), kLoop).verdict == Verdict::WellBehaved);
  CHECK(ask(make_liar_verifier(100, Task::InstanceHalting), kLoop).verdict == Verdict::Halts);
  CHECK(ask(make_abstaining_verifier(Task::InstanceHalting), "(return (int 0))").verdict == Verdict::DontKnow);
  const VerifierAnswer c = ask(make_constant_verifier(Task::InstanceHalting, Verdict::DoesNotHalt, 7), kFiveSteps);
  CHECK(c.verdict == Verdict::DoesNotHalt);
  CHECK(c.steps_used == 7);
}

TEST_CASE("parse_verifier") {
  CHECK(parse_verifier("bounded:250", Task::InstanceHalting).internal_budget == 250);
  CHECK(parse_verifier("bounded:250", Task::InstanceHalting).kind == VerifierKind::BoundedSim);
  CHECK(parse_verifier("liar:9", Task::ProgVerification).kind == VerifierKind::Liar);
  CHECK(parse_verifier("abstain", Task::TimeBounded).stub_verdict == Verdict::DontKnow);
  const auto k = parse_verifier("const:halts:12", Task::InstanceHalting);
  CHECK(k.stub_verdict == Verdict::Halts);
  CHECK(k.stub_steps == 12);
  CHECK(k.id == "const:halts:12");
  const auto coin = parse_verifier("coin:7/10:halts", Task::InstanceHalting);
  CHECK(coin.stub_num == 7);
  CHECK(coin.stub_den == 10);
  CHECK(coin.randomized);
  for (const char* bad : {"", "bounded", "bounded:x", "liar:", "const:halts-within-t", "coin:3/2:halts",
                          "coin:1/0:halts", "const:nonsense", "oracle"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_verifier(bad, Task::InstanceHalting), std::invalid_argument);
  }
}

TEST_CASE("registry") {
  Registry reg;
  reg.add(make_bounded_sim_verifier(10));
  CHECK(reg.has("bounded:10"));
  CHECK_THROWS_AS(reg.add(make_bounded_sim_verifier(10)), std::invalid_argument);
  CHECK_THROWS_AS(reg.at("nope"), UnknownVerifier);
  NoRandom none;
  const Value bad[] = {Value::integer(1)};
  CHECK(reg.ask("bounded:10", bad, kUnlimited, none).status == OracleReply::Status::BadArguments);
}

TEST_CASE("oracle cost under the two policies") {
  Registry reg;
  reg.add(make_bounded_sim_verifier(100));
  const Program caller = parse("(oracle bounded:100 (quote (return (int 0))) (int 0))");
  const auto free_run = run(caller, Value(), Fuel{1'000, OraclePolicy::Free}, 0, reg);
  const auto metered = run(caller, Value(), Fuel{1'000, OraclePolicy::Metered}, 0, reg);
  REQUIRE(free_run.report.halted());
  REQUIRE(metered.report.halted());
  CHECK(free_run.report.value == Value::verdict(Verdict::Halts));
  CHECK(free_run.report.steps == oracle::straight_line_steps(serialize(caller)) - 2);  // quoted nodes are not entered
  CHECK(metered.report.steps == free_run.report.steps + 2);  // plus the simulated (return (int 0))
  // Metered with too little fuel: the verifier is cut off.
  const auto starved = run(caller, Value(), Fuel{3, OraclePolicy::Metered}, 0, reg);
  CHECK_FALSE(starved.report.halted());
  CHECK(starved.stop_reason == "oracle-truncated");
}

TEST_CASE("trace validation") {
  Registry reg;
  const auto& spec = reg.add(make_bounded_sim_verifier(1'000));
  const auto& coin = reg.add(make_coin_verifier(Task::InstanceHalting, Verdict::Halts, 1, 2));
  const Program p = parse(kFiveSteps);
  const VerifierAnswer a = verify(reg, spec, p, Value(), std::nullopt, 0);
  CHECK(validate_trace(reg, spec.id, p, *a.trace));
  CHECK(a.trace->step_hashes().size() == 5);

  const Trace& t = *a.trace;
  const Trace flipped(t.verifier_id(), t.subject(), t.input(), t.time_limit(), t.random_draws(), t.step_hashes(),
                      Verdict::DoesNotHalt);
  CHECK_FALSE(validate_trace(reg, spec.id, p, flipped));
  CHECK_FALSE(validate_trace(reg, spec.id, parse("(return (int 1))"), *a.trace));
  auto hashes = t.step_hashes();
  hashes.back() += 1;
  CHECK_FALSE(validate_trace(reg, spec.id, p, Trace(t.verifier_id(), t.subject(), t.input(), t.time_limit(),
                                                     t.random_draws(), hashes, t.final_verdict())));
  CHECK_FALSE(validate_trace(reg, "nope", p, *a.trace));

  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const VerifierAnswer r = verify(reg, coin, p, Value(), std::nullopt, seed);
    CHECK(r.trace->random_draws().size() == 1);
    CHECK(validate_trace(reg, coin.id, p, *r.trace));
    auto draws = r.trace->random_draws();
    draws[0] = !draws[0];
    CHECK_FALSE(validate_trace(reg, coin.id, p, Trace(coin.id, p, Value(), std::nullopt, draws,
                                                      r.trace->step_hashes(), r.trace->final_verdict())));
    draws.push_back(true);
    CHECK_FALSE(validate_trace(reg, coin.id, p, Trace(coin.id, p, Value(), std::nullopt, draws,
                                                      r.trace->step_hashes(), r.trace->final_verdict())));
  }
}

TEST_CASE("certify") {
  const Registry none;
  const GroundTruth h = certify(none, parse(kFiveSteps), Value(), 100);
  CHECK(h.status == GroundTruth::Status::Halts);
  CHECK(h.report.steps == 5);
  CHECK(certify(none, parse(kLoop), Value(), 100).status == GroundTruth::Status::Diverges);
  CHECK(certify(none, parse(kFiveSteps), Value(), 4).status == GroundTruth::Status::Undetermined);
  CHECK(certify(none, parse("(program int (var x))"), Value::integer(1), 10).reads_input);

  CHECK(contradicts(Task::InstanceHalting, Verdict::DoesNotHalt, h));
  CHECK_FALSE(contradicts(Task::InstanceHalting, Verdict::Halts, h));
  CHECK_FALSE(contradicts(Task::InstanceHalting, Verdict::DontKnow, h));
}

TEST_CASE("safety audits") {
  const auto corpus = build_corpus(50, 0);
  const auto entries = entries_of(corpus);
  Registry reg;
  const auto& safe = reg.add(make_bounded_sim_verifier(10'000));
  const SafetyAuditReport ok = audit_safety(reg, safe, entries, kCorpusCertifyBudget);
  CHECK(ok.corpus_size == 50);
  CHECK(ok.empirically_safe());

  const auto& liar = reg.add(make_liar_verifier(100, Task::InstanceHalting));
  const SafetyAuditReport bad = audit_safety(reg, liar, entries, kCorpusCertifyBudget);
  std::size_t divergent_labelled_halting = 0;
  for (const auto& e : corpus) {
    if (e.truth.status != GroundTruth::Status::Diverges || e.truth.draws > 0) continue;
    divergent_labelled_halting +=
        verify(reg, liar, e.entry.program, e.entry.input, std::nullopt, 0).verdict == Verdict::Halts;
  }
  CHECK(divergent_labelled_halting > 0);
  CHECK(bad.false_claims.size() >= divergent_labelled_halting);

  const SafetyAuditReport empty = audit_safety(reg, safe, {}, kCorpusCertifyBudget);
  CHECK(empty.corpus_size == 0);
  CHECK(empty.false_claims.empty());

  const auto& tb = reg.add(make_bounded_sim_verifier(40, Task::TimeBounded));
  CHECK(audit_safety(reg, tb, entries, kCorpusCertifyBudget, 50).empirically_safe());
}

TEST_CASE("answer probability estimates") {
  Registry reg;
  const Program p = parse("(return (int 0))");
  const auto& abstain = reg.add(make_abstaining_verifier(Task::InstanceHalting));
  const auto zero = estimate_answer_probability(reg, abstain, p, Value(), Verdict::Halts, 1'000, 0);
  CHECK(zero.successes == 0);
  CHECK(zero.mean == 0.0);
  CHECK(zero.lo == 0.0);

  const auto& coin = reg.add(make_coin_verifier(Task::InstanceHalting, Verdict::Halts, 1, 2));
  const auto half = estimate_answer_probability(reg, coin, p, Value(), Verdict::Halts, 1'000, 0);
  CHECK(half.lo <= 0.5);
  CHECK(half.hi >= 0.5);

  const auto& liar = reg.add(parse_verifier("liar:100:7/10", Task::InstanceHalting));
  const auto seventy = estimate_answer_probability(reg, liar, parse(kLoop), Value(), Verdict::Halts, 1'000, 0);
  CHECK(seventy.lo <= 0.7);
  CHECK(seventy.hi >= 0.7);

  const auto w = wilson_interval(37, 120);
  const auto o = oracle::wilson(37, 120);
  CHECK(w.lo == doctest::Approx(o.lo));
  CHECK(w.hi == doctest::Approx(o.hi));
}
