#include <doctest.h>

#include "diagforge/corpus.hpp"
#include "diagforge/diagonal.hpp"
#include "diagforge/reductions.hpp"
#include "diagforge/syntax.hpp"
#include "oracles.hpp"

using namespace diagforge;

namespace {

const NoOracles kNone;
const char* const kFiveSteps = "(seq (int 1) (pair (int 2) (int 3)))";

PlanningResult plan_for(std::string_view src, std::uint64_t budget = 10'000) {
  const PlanningInstance inst = halting_to_planning(parse(src), Value());
  return solve_planning(inst, budget, kNone);
}

Value str(const char* s) { return Value::string(s); }

}  // namespace

TEST_CASE("halting programs give plans as long as their runs") {
  for (const char* src : {"(return (int 0))", kFiveSteps, "(return (pair (int 1) (int 2)))"}) {
    CAPTURE(src);
    const PlanningResult r = plan_for(src);
    REQUIRE(r.status == PlanningResult::Status::Solved);
    CHECK(r.plan.moves.size() == oracle::straight_line_steps(src));
  }
}

TEST_CASE("loops give cycle-backed infeasibility") {
  const PlanningInstance inst = halting_to_planning(parse("(while-true (seq))"), Value());
  const PlanningResult r = solve_planning(inst, 10'000, kNone);
  REQUIRE(r.status == PlanningResult::Status::Infeasible);
  CHECK(r.certificate.kind == InfeasibilityCertificate::Kind::CycleBacked);
  CHECK(r.certificate.cycle_len == 1);
  CHECK(verify_certificate(inst, r.certificate, kNone));
  InfeasibilityCertificate bad = r.certificate;
  bad.cycle_len = 0;
  CHECK_FALSE(verify_certificate(inst, bad, kNone));
  // The same claim about a halting program.
  CHECK_FALSE(verify_certificate(halting_to_planning(parse(kFiveSteps), Value()), r.certificate, kNone));
}

TEST_CASE("plan verification") {
  const PlanningInstance inst = halting_to_planning(parse(kFiveSteps), Value());
  const PlanningResult r = solve_planning(inst, 10'000, kNone);
  REQUIRE(r.status == PlanningResult::Status::Solved);
  CHECK(verify_plan(inst, r.plan, kNone));
  Plan shorter = r.plan;
  shorter.moves.pop_back();
  CHECK_FALSE(verify_plan(inst, shorter, kNone));
  Plan wrong = r.plan;
  wrong.moves[0] = str("retreat");
  CHECK_FALSE(verify_plan(inst, wrong, kNone));
  // A budget below the plan length cannot decide.
  CHECK(solve_planning(inst, 3, kNone).status == PlanningResult::Status::Unknown);
}

TEST_CASE("general planning instances") {
  PlanningInstance at_goal{parse("(str \"not-allowed\")"), Value::integer(1), parse("(eq (var x) (int 1))"),
                           {str("m")}, std::nullopt};
  const PlanningResult empty = solve_planning(at_goal, 10, kNone);
  REQUIRE(empty.status == PlanningResult::Status::Solved);
  CHECK(empty.plan.moves.empty());
  CHECK(verify_plan(at_goal, empty.plan, kNone));

  PlanningInstance words{parse("(concat (fst (var x)) (snd (var x)))"), str(""), parse("(eq (var x) (str \"ba\"))"),
                         {str("a"), str("b")}, std::nullopt};
  const PlanningResult w = solve_planning(words, 100, kNone);
  REQUIRE(w.status == PlanningResult::Status::Solved);
  CHECK(w.plan.moves == std::vector<Value>{str("b"), str("a")});

  // Two states toggled by either move; the goal state 2 never appears.
  PlanningInstance toggle{parse("(if (eq (fst (var x)) (int 0)) (int 1) (int 0))"), Value::integer(0),
                          parse("(eq (var x) (int 2))"), {str("p"), str("q")}, std::nullopt};
  const PlanningResult t = solve_planning(toggle, 100, kNone);
  REQUIRE(t.status == PlanningResult::Status::Infeasible);
  CHECK(t.certificate.kind == InfeasibilityCertificate::Kind::ExhaustiveFrontier);
  CHECK(t.certificate.visited.size() == 2);
  CHECK(verify_certificate(toggle, t.certificate, kNone));
  InfeasibilityCertificate missing = t.certificate;
  missing.visited.pop_back();
  CHECK_FALSE(verify_certificate(toggle, missing, kNone));
}

TEST_CASE("time-bounded reachability") {
  const Program p = parse(kFiveSteps);
  const GraphInstance ten = tb_halting_to_reachability(p, Value(), 10);
  const ReachabilityResult r = solve_reachability(ten, kNone);
  REQUIRE(r.reachable);
  CHECK(r.path.size() - 1 == 6);
  CHECK(r.path.back() == ten.sink);
  CHECK(verify_path(ten, r.path, kNone));
  auto cut = r.path;
  cut.erase(cut.begin() + 2);
  CHECK_FALSE(verify_path(ten, cut, kNone));

  const GraphInstance three = tb_halting_to_reachability(p, Value(), 3);
  const ReachabilityResult n = solve_reachability(three, kNone);
  REQUIRE_FALSE(n.reachable);
  CHECK(n.certificate.kind == InfeasibilityCertificate::Kind::ExhaustiveFrontier);
  CHECK(n.certificate.visited.size() == 4);
  CHECK(verify_certificate(three, n.certificate, kNone));
  InfeasibilityCertificate missing = n.certificate;
  missing.visited.erase(missing.visited.begin() + 1);
  CHECK_FALSE(verify_certificate(three, missing, kNone));

  // Exactly the step count is enough.
  CHECK(solve_reachability(tb_halting_to_reachability(p, Value(), 5), kNone).reachable);
  CHECK_FALSE(solve_reachability(tb_halting_to_reachability(p, Value(), 4), kNone).reachable);
}

TEST_CASE("explicit graphs") {
  const Program adj = parse("(if (eq (var x) (str \"s\")) (pair (str \"t\") (seq)) (seq))");
  const GraphInstance g{adj, str("s"), str("t"), 2, std::nullopt};
  const ReachabilityResult r = solve_reachability(g, kNone);
  REQUIRE(r.reachable);
  CHECK(r.path == std::vector<Value>{str("s"), str("t")});

  const GraphInstance same{adj, str("s"), str("s"), 2, std::nullopt};
  const ReachabilityResult s = solve_reachability(same, kNone);
  REQUIRE(s.reachable);
  CHECK(s.path == std::vector<Value>{str("s")});

  const GraphInstance backwards{adj, str("t"), str("s"), 2, std::nullopt};
  CHECK_FALSE(solve_reachability(backwards, kNone).reachable);

  const GraphInstance liar{parse("(pair (concat (var x) (str \"a\")) (seq))"), str(""), str("never"), 5, std::nullopt};
  CHECK_THROWS_AS(solve_reachability(liar, kNone), std::length_error);

  CHECK(list_elements(Value::pair(Value::integer(1), Value::pair(Value::integer(2), Value()))).size() == 2);
}

TEST_CASE("diagonal instances have short proofs the verifier cannot find") {
  Registry reg;
  const auto& hv = reg.add(make_bounded_sim_verifier(10'000));
  const auto [p, in] = self_instance(build_turing_program(reg, hv.id));
  const PlanningInstance inst = halting_to_planning(p, in);
  const PlanningResult r = solve_planning(inst, 10'000, reg);
  REQUIRE(r.status == PlanningResult::Status::Infeasible);
  CHECK(verify_certificate(inst, r.certificate, reg));
  CHECK(verify(reg, hv, p, in, std::nullopt, 0).verdict == Verdict::DontKnow);

  const std::uint64_t T = 1'000;
  const std::uint64_t c = measure_overhead_c(Construction::TuringT, T);
  Registry tb;
  const auto& tv = tb.add(make_bounded_sim_verifier(T - c, Task::TimeBounded));
  const auto [q, qin] = self_instance(build_turing_T(tb, tv.id, T));
  const GraphInstance g = tb_halting_to_reachability(q, qin, T, 0, OraclePolicy::Metered);
  const ReachabilityResult gr = solve_reachability(g, tb);
  REQUIRE_FALSE(gr.reachable);
  CHECK(verify_certificate(g, gr.certificate, tb));
  CHECK(verify(tb, tv, q, qin, T, 0).verdict == Verdict::DontKnow);
}

TEST_CASE("reductions agree with certified ground truth") {
  const auto corpus = build_corpus(30, 5);
  for (const auto& e : corpus) {
    if (e.truth.status == GroundTruth::Status::Undetermined || e.truth.draws > 0) continue;
    CAPTURE(e.entry.id);
    const PlanningInstance inst = halting_to_planning(e.entry.program, e.entry.input);
    const PlanningResult r = solve_planning(inst, kCorpusCertifyBudget, kNone);
    if (e.truth.status == GroundTruth::Status::Halts) {
      REQUIRE(r.status == PlanningResult::Status::Solved);
      CHECK(r.plan.moves.size() == e.truth.report.steps);
    } else {
      CHECK(r.status == PlanningResult::Status::Infeasible);
    }
    for (std::uint64_t T : {3u, 20u}) {
      const bool reach = solve_reachability(tb_halting_to_reachability(e.entry.program, e.entry.input, T), kNone).reachable;
      CHECK(reach == (e.truth.status == GroundTruth::Status::Halts && e.truth.report.steps <= T));
    }
  }
}
