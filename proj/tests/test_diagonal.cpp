#include <doctest.h>

#include <functional>

#include "diagforge/diagonal.hpp"
#include "diagforge/syntax.hpp"
#include "polarity.hpp"

using namespace diagforge;

TEST_CASE("polarity table") {
  const auto cases = polarity::run_all();
  CHECK(cases.size() == 16);
  for (const auto& c : cases) {
    CAPTURE(c.label());
    CHECK(c.ok());
  }
}

TEST_CASE("builder outputs round-trip and are canonical") {
  Registry pv, ih, tb, rh;
  pv.add(make_bounded_sim_verifier(100, Task::ProgVerification));
  ih.add(make_bounded_sim_verifier(100, Task::InstanceHalting));
  tb.add(make_bounded_sim_verifier(100, Task::TimeBounded));
  rh.add(make_abstaining_verifier(Task::RandomizedHalting));
  const std::vector<std::function<Program()>> builders{
      [&] { return build_godel_program(pv, "bounded:100"); },
      [&] { return build_turing_program(ih, "bounded:100"); },
      [&] { return build_turing_T(tb, "bounded:100", 500); },
      [&] { return build_turing_program_v2(rh, "abstain"); },
      [&] { return build_turing_T_v2(tb, "bounded:100", 500); },
      [&] { return build_godel_program_random(ih, "bounded:100"); },
      [&] { return build_godel_program_random(pv, "bounded:100", 1, 20, 5'000); },
  };
  for (const auto& build : builders) {
    const Program a = build();
    const std::string text = serialize(a);
    CHECK(parse(text) == a);
    CHECK(serialize(build()) == text);
  }
}

TEST_CASE("builders validate their verifier") {
  Registry reg;
  reg.add(make_bounded_sim_verifier(100, Task::InstanceHalting));
  CHECK_THROWS_AS(build_turing_program(reg, "missing"), UnknownVerifier);
  CHECK_THROWS(build_godel_program(reg, "bounded:100"));
  CHECK_THROWS(build_turing_T(reg, "bounded:100", 1'000));
  const Program a = build_turing_program(reg, "bounded:100");
  const Program b = build_turing_program(reg, "bounded:100");
  CHECK(serialize(a) == serialize(b));
  CHECK(parse(serialize(a)) == a);
}

TEST_CASE("time-bounded builders reject tiny limits") {
  Registry reg;
  reg.add(make_bounded_sim_verifier(100, Task::TimeBounded));
  const std::uint64_t c = static_overhead(Construction::TuringT);
  CHECK_THROWS_AS(build_turing_T(reg, "bounded:100", c - 1), BudgetTooSmall);
  CHECK_NOTHROW(build_turing_T(reg, "bounded:100", c));
  CHECK_THROWS_AS(build_turing_T_v2(reg, "bounded:100", 0), BudgetTooSmall);
  for (std::uint64_t T : {50u, 1'000u}) {
    CHECK(parse(serialize(build_turing_T(reg, "bounded:100", T))) == build_turing_T(reg, "bounded:100", T));
    CHECK(parse(serialize(build_turing_T_v2(reg, "bounded:100", T))) == build_turing_T_v2(reg, "bounded:100", T));
  }
}

TEST_CASE("dispatch overhead") {
  for (auto c : {Construction::TuringT, Construction::TuringTV2}) {
    CAPTURE(to_string(c));
    const std::uint64_t small = measure_overhead_c(c, 1'000);
    CHECK(small > 0);
    CHECK(measure_overhead_c(c, 1'000'000) == small);
    CHECK(measure_overhead_c(c, 1'000, 25) == small);
    CHECK(static_overhead(c) == small);
  }
  const auto d_measured = static_cast<std::int64_t>(measure_overhead_c(Construction::TuringTV2, 1'000)) -
                          static_cast<std::int64_t>(measure_overhead_c(Construction::TuringT, 1'000));
  const auto d_static = static_cast<std::int64_t>(static_overhead(Construction::TuringTV2)) -
                        static_cast<std::int64_t>(static_overhead(Construction::TuringT));
  CHECK(d_measured == d_static);
}

TEST_CASE("self-reference against a safe verifier") {
  Registry reg;
  const auto& pv = reg.add(make_bounded_sim_verifier(10'000, Task::ProgVerification));
  const Program g = build_godel_program(reg, pv.id);
  const VerifierAnswer a = verify(reg, pv, g, Value(), std::nullopt, 0);
  CHECK(a.verdict == Verdict::DontKnow);
  CHECK(validate_trace(reg, pv.id, g, *a.trace));
  const RunResult r = run(g, Value::pair(Value::program(g), Value::trace(a.trace)),
                          Fuel{100'000, OraclePolicy::Free}, 0, reg);
  CHECK(classify(r) == Behaviour::HaltZero);
  // A non-trace second component fails the validity check.
  const RunResult junk = run(g, Value::pair(Value::program(g), Value::integer(3)), Fuel{1'000, OraclePolicy::Free}, 0, reg);
  CHECK(classify(junk) == Behaviour::HaltZero);

  Registry ih;
  const auto& hv = ih.add(make_bounded_sim_verifier(10'000, Task::InstanceHalting));
  const auto [t, tin] = self_instance(build_turing_program(ih, hv.id));
  CHECK(verify(ih, hv, t, tin, std::nullopt, 0).verdict == Verdict::DontKnow);
  const RunResult tr = run(t, tin, Fuel{100'000, OraclePolicy::Free}, 0, ih);
  REQUIRE(tr.report.cycled());
  CHECK(verify_cycle_certificate({t, tin, 0, OraclePolicy::Free, tr.report.prefix_len, tr.report.cycle_len}, ih));
}

TEST_CASE("liar on the Goedel program regresses") {
  Registry reg;
  const auto& liar = reg.add(make_liar_verifier(10'000));
  const Program g = build_godel_program(reg, liar.id);
  const VerifierAnswer a = verify(reg, liar, g, Value(), std::nullopt, 0);
  CHECK(a.verdict == Verdict::WellBehaved);
  CHECK(validate_trace(reg, liar.id, g, *a.trace));
  const Value input = Value::pair(Value::program(g), Value::trace(a.trace));
  std::size_t last = 0;
  for (std::uint64_t fuel : {5'000u, 10'000u, 20'000u}) {
    const RunResult r = run(g, input, Fuel{fuel, OraclePolicy::Free}, 0, reg);
    CHECK(classify(r) == Behaviour::EvalRegress);
    CHECK(r.max_eval_depth > last);
    last = r.max_eval_depth;
  }
}

TEST_CASE("time-bounded diagonal") {
  for (std::uint64_t T : {1'000u, 10'000u}) {
    CAPTURE(T);
    const std::uint64_t c = measure_overhead_c(Construction::TuringT, T);
    Registry reg;
    const auto& safe = reg.add(make_bounded_sim_verifier(T - c, Task::TimeBounded));
    const auto [p, in] = self_instance(build_turing_T(reg, safe.id, T));
    CHECK(verify(reg, safe, p, in, T, 0).verdict == Verdict::DontKnow);
    CHECK_FALSE(run(p, in, Fuel{T, OraclePolicy::Metered}, 0, reg).report.halted());

    Registry bad;
    const auto& stub = bad.add(make_constant_verifier(Task::TimeBounded, Verdict::DoesNotHaltWithinT, T - c - 1));
    const auto [q, qin] = self_instance(build_turing_T(bad, stub.id, T));
    const RunResult r = run(q, qin, Fuel{T, OraclePolicy::Metered}, 0, bad);
    REQUIRE(r.report.halted());
    CHECK(r.report.value == Value::integer(0));
    CHECK(r.report.steps == T - 1);
  }
}

TEST_CASE("inverted constructions") {
  Registry reg;
  const auto& abstain = reg.add(make_abstaining_verifier(Task::RandomizedHalting));
  const auto [p, in] = self_instance(build_turing_program_v2(reg, abstain.id));
  CHECK(classify(run(p, in, Fuel{10'000, OraclePolicy::Free}, 0, reg)) == Behaviour::HaltZero);
  CHECK(estimate_answer_probability(reg, abstain, p, in, Verdict::AlwaysHalts, 300, 0).successes == 0);

  const std::uint64_t T = 1'000;
  const std::uint64_t c = measure_overhead_c(Construction::TuringTV2, T);
  Registry tb;
  const auto& safe = tb.add(make_bounded_sim_verifier(T, Task::TimeBounded));
  const auto [q, qin] = self_instance(build_turing_T_v2(tb, safe.id, T));
  const RunResult r = run(q, qin, Fuel{100'000, OraclePolicy::Metered}, 0, tb);
  REQUIRE(r.report.halted());
  CHECK(r.report.steps <= T + c);
}

TEST_CASE("random Goedel program against an abstainer mostly halts") {
  Registry reg;
  const auto& abstain = reg.add(make_abstaining_verifier(Task::InstanceHalting));
  const auto [p, in] = self_instance(build_godel_program_random(reg, abstain.id));
  int halted = 0;
  for (std::uint64_t s = 0; s < 30; ++s) halted += run(p, in, Fuel{1'000'000, OraclePolicy::Free}, s, reg).report.halted();
  CHECK(halted >= 28);
}
