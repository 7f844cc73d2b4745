#include <doctest.h>

#include "diagforge/corpus.hpp"
#include "diagforge/json.hpp"
#include "diagforge/machine.hpp"
#include "diagforge/syntax.hpp"
#include "oracles.hpp"

using namespace diagforge;

namespace {

const NoOracles kNone;

RunResult go(std::string_view src, Value input = {}, std::uint64_t fuel = 10'000, std::uint64_t seed = 0) {
  return run(parse(src), input, Fuel{fuel, OraclePolicy::Free}, seed, kNone);
}

Value result_of(std::string_view src, Value input = {}) {
  const RunResult r = go(src, std::move(input));
  REQUIRE(r.report.halted());
  return r.report.value;
}

}  // namespace

TEST_CASE("parse builds the expected trees") {
  const Program p = parse("(return (int 0))");
  CHECK(p.root().kind() == NodeKind::Return);
  REQUIRE(p.root().children().size() == 1);
  CHECK(p.root().children()[0]->kind() == NodeKind::IntLit);
  CHECK(p.root().children()[0]->int_value() == 0);
  CHECK(p.input_shape().kind() == Shape::Kind::Any);

  const Program loop = parse("(while-true (seq))");
  CHECK(loop.root().kind() == NodeKind::WhileTrue);
  CHECK(loop.root().children()[0]->kind() == NodeKind::Seq);
  CHECK(loop.root().children()[0]->children().empty());

  const Program shaped = parse("(program (pair program trace) (fst (var x)))");
  CHECK(shaped.input_shape().kind() == Shape::Kind::Pair);
  CHECK(shaped.input_shape().first().kind() == Shape::Kind::Program);
  CHECK(shaped.input_shape().second().kind() == Shape::Kind::Trace);
}

TEST_CASE("serialize is canonical") {
  CHECK(serialize(Program(Node::op(NodeKind::Return, {Node::int_lit(0)}))) == "(return (int 0))");
  CHECK(serialize(parse("  (return\n ; comment\n   (int   0))")) == "(return (int 0))");
  CHECK(serialize(parse("(str \"a\\\"b\\\\c\\nd\")")) == "(str \"a\\\"b\\\\c\\nd\")");
  CHECK(serialize(parse("(program int (var x))")) == "(program int (var x))");
  CHECK(serialize(parse_shape("(pair int (pair str any))")) == "(pair int (pair str any))");
}

TEST_CASE("syntax errors carry a position") {
  for (const char* bad : {"", "(", "(return)", "(int x)", "(frobnicate (int 1))", "(return (int 0)) extra",
                          "(str \"unterminated)", "(int 99999999999999999999)", "(let 5 (int 1) (int 2))",
                          "(oracle)", "(bernoulli 3 2)", "(program blob (int 0))"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse(bad), SyntaxError);
  }
  try {
    parse("(return (int 0) (int 1))");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.position() > 0);
    CHECK_FALSE(e.expected().empty());
  }
}

TEST_CASE("round trip over generated programs") {
  SplitMix64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const Program p = random_program(rng);
    const std::string text = serialize(p);
    const Program back = parse(text);
    CHECK(back == p);
    CHECK(serialize(back) == text);
  }
}

TEST_CASE("step counts match the hand count") {
  for (const char* src : {"(return (int 0))", "(return (pair (int 1) (int 2)))", "(seq (int 1) (return (int 0)))",
                          "(return (concat (str \"a\") (pair (int 1) (int 2))))", "(seq)"}) {
    CAPTURE(src);
    const RunResult r = go(src);
    REQUIRE(r.report.halted());
    CHECK(r.report.steps == oracle::straight_line_steps(src));
  }
  CHECK(go("(return (int 0))").report.steps == 2);
}

TEST_CASE("bare loop gives a one-transition cycle") {
  const RunResult r = go("(while-true (seq))", {}, 10'000);
  REQUIRE(r.report.cycled());
  CHECK(r.report.prefix_len == 1);
  CHECK(r.report.cycle_len == 1);
  const CycleCertificate good{parse("(while-true (seq))"), Value(), 0, OraclePolicy::Free, r.report.prefix_len,
                              r.report.cycle_len};
  CHECK(verify_cycle_certificate(good, kNone));
  CycleCertificate bad = good;
  bad.program = parse("(return (int 0))");
  CHECK_FALSE(verify_cycle_certificate(bad, kNone));
}

TEST_CASE("fuel exhaustion on growing state") {
  const RunResult r = go("(let a (str \"\") (while-true (concat (var a) (str \"!\"))))", {}, 50);
  // The loop body result is discarded, so the state does recur.
  CHECK(r.report.cycled());
  const RunResult grow = go("(program any (eval (var x) (var x)))",
                            Value::program(parse("(program any (eval (var x) (var x)))")), 2'000);
  CHECK(grow.report.outcome == HaltReport::Outcome::FuelExhausted);
  CHECK(grow.stop_reason == "fuel");
  CHECK(grow.max_eval_depth > 10);
}

TEST_CASE("operators") {
  CHECK(result_of("(seq)") == Value());
  CHECK(result_of("(pair (int 1) (str \"a\"))") == Value::pair(Value::integer(1), Value::string("a")));
  CHECK(result_of("(concat (str \"Not \") (int 0))") == Value::string("Not 0"));
  CHECK(result_of("(let a (int 3) (let a (int 4) (var a)))") == Value::integer(4));
  CHECK(result_of("(seq (int 1) (int 2))") == Value::integer(2));
  CHECK(result_of("(if (int 0) (int 1) (int 2))") == Value::integer(2));
  CHECK(result_of("(if (int -5) (int 1) (int 2))") == Value::integer(1));
  CHECK(result_of("(fst (pair (int 1) (int 2)))") == Value::integer(1));
  CHECK(result_of("(snd (pair (int 1) (int 2)))") == Value::integer(2));
  CHECK(result_of("(eq (str \"a\") (str \"a\"))") == Value::integer(1));
  CHECK(result_of("(eq (int 1) (str \"1\"))") == Value::integer(0));
  CHECK(result_of("(lt (int 1) (int 2))") == Value::integer(1));
  CHECK(result_of("(verdict dont-know)") == Value::verdict(Verdict::DontKnow));
  CHECK(result_of("(var x)", Value::integer(7)) == Value::integer(7));
  CHECK(result_of("(eval (quote (program int (return (var x)))) (int 5))") == Value::integer(5));
  // return inside eval only leaves the eval
  CHECK(result_of("(seq (eval (quote (return (int 1))) (seq)) (int 2))") == Value::integer(2));
  CHECK(result_of("(while-true (return (int 9)))") == Value::integer(9));
  CHECK(result_of("(typecheck-input (quote (program int (int 0))) (int 1))") == Value::integer(1));
  CHECK(result_of("(typecheck-input (quote (program int (int 0))) (str \"a\"))") == Value::integer(0));
  CHECK(result_of("(typecheck-input (int 3) (int 1))") == Value::integer(0));
}

TEST_CASE("type faults halt with a fault value") {
  for (const char* src : {"(if (str \"a\") (int 1) (int 2))", "(fst (int 1))", "(lt (str \"a\") (int 1))",
                          "(eval (int 1) (int 2))", "(eval (quote (program int (int 0))) (str \"a\"))",
                          "(var nope)", "(trace-final-verdict (int 1))", "(config-step (int 1))"}) {
    CAPTURE(src);
    const RunResult r = go(src);
    REQUIRE(r.report.halted());
    CHECK(r.report.fault());
  }
}

TEST_CASE("unbound oracles throw") {
  CHECK_THROWS_AS(go("(oracle nobody (int 1))"), UnboundOracle);
}

TEST_CASE("apply_self") {
  const Program id = parse("(return (var x))");
  const auto [p, input] = apply_self(id);
  CHECK(p == id);
  CHECK(result_of("(return (var x))", input) == Value::program(id));
}

TEST_CASE("randomness is seeded and recorded") {
  const char* coin = "(while-true (if (bernoulli 1 2) (return (int 1)) (seq)))";
  const RunResult a = go(coin, {}, 10'000, 42);
  const RunResult b = go(coin, {}, 10'000, 42);
  REQUIRE(a.report.halted());
  CHECK(a.report.steps == b.report.steps);
  CHECK(a.draws == b.draws);
  CHECK(a.draws >= 1);
  int differs = 0;
  for (std::uint64_t s = 0; s < 20; ++s) differs += go(coin, {}, 10'000, s).draws != a.draws;
  CHECK(differs > 0);
  CHECK(result_of("(bernoulli 0 3)") == Value::integer(0));
  CHECK(result_of("(bernoulli 3 3)") == Value::integer(1));

  RunOptions no_rng;
  no_rng.allow_randomness = false;
  const RunResult stuck = run(parse(coin), Value(), Fuel{100, OraclePolicy::Free}, 0, kNone, no_rng);
  CHECK(stuck.stop_reason == "randomness-unavailable");
}

TEST_CASE("runs are deterministic") {
  const auto corpus = build_corpus(25, 3);
  RunOptions opts;
  opts.record_step_hashes = true;
  for (const auto& e : corpus) {
    const RunResult a = run(e.entry.program, e.entry.input, Fuel{5'000, OraclePolicy::Free}, 9, kNone, opts);
    const RunResult b = run(e.entry.program, e.entry.input, Fuel{5'000, OraclePolicy::Free}, 9, kNone, opts);
    CHECK(report_to_json(a.report).dump() == report_to_json(b.report).dump());
    CHECK(a.step_hashes == b.step_hashes);
  }
}

TEST_CASE("value json round trip") {
  const Value v = Value::pair(Value::integer(-3),
                              Value::pair(Value::string("q\"x"), Value::pair(Value::verdict(Verdict::Halts), Value())));
  CHECK(value_from_json(value_to_json(v)) == v);
  const Value prog = Value::program(parse("(program int (return (var x)))"));
  CHECK(value_from_json(value_to_json(prog)) == prog);
}

TEST_CASE("elimination schedule targets") {
  for (std::uint64_t r = 1; r <= 8; ++r) {
    CAPTURE(r);
    CHECK(EliminationSchedule::epoch_target(r, 0.01) == oracle::epoch_target(r, 0.01));
  }
  // Perfect separation ends after the first epoch.
  EliminationSchedule s(1, 100, 1'000'000);
  std::uint64_t pulls = 0;
  while (true) {
    const auto a = s.next();
    if (a == EliminationSchedule::Action::PullArm1) s.record(1, true);
    else if (a == EliminationSchedule::Action::PullArm2) s.record(2, false);
    else {
      CHECK(a == EliminationSchedule::Action::Arm1Wins);
      break;
    }
    ++pulls;
  }
  CHECK(pulls == 2 * oracle::epoch_target(1, 0.01));
  CHECK(s.epoch() == 1);
}
