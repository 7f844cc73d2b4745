#include "diagforge/diagonal.hpp"

#include "diagforge/syntax.hpp"

namespace diagforge {

namespace {

const VerifierSpec& require(const Registry& registry, std::string_view id, std::initializer_list<Task> tasks) {
  const VerifierSpec& spec = registry.at(id);
  for (Task t : tasks) {
    if (spec.task == t) return spec;
  }
  throw std::invalid_argument("verifier '" + std::string(id) + "' answers " + std::string(to_string(spec.task)) +
                              ", which this construction cannot use");
}

// Two-way dispatch on the oracle's answer about (x, x).
std::string dispatch(std::string_view id, std::string_view extra, Verdict v, bool loop_on_match) {
  const std::string query = "(oracle " + std::string(id) + " (var x) (var x)" + std::string(extra) + ")";
  const std::string test = "(eq " + query + " (verdict " + std::string(to_string(v)) + "))";
  const std::string halt = "(return (int 0))";
  const std::string loop = "(while-true (seq))";
  return "(program program (if " + test + " " + (loop_on_match ? loop : halt) + " " +
         (loop_on_match ? halt : loop) + "))";
}

std::string time_arg(std::uint64_t t) { return " (int " + std::to_string(t) + ")"; }

// Overhead of a two-way dispatch: everything but the looping branch.
std::uint64_t dispatch_overhead(const Program& p) {
  const Node& root = p.root();
  const auto& kids = root.children();
  const NodePtr& loop = kids[1]->kind() == NodeKind::WhileTrue ? kids[1] : kids[2];
  return root.size() - loop->size();
}

Program shape_of(Construction c) {
  Registry r;
  switch (c) {
    case Construction::Turing:
      r.add(make_abstaining_verifier(Task::InstanceHalting));
      return build_turing_program(r, "abstain");
    case Construction::TuringT:
      r.add(make_abstaining_verifier(Task::TimeBounded));
      return build_turing_T(r, "abstain", 1'000);
    case Construction::TuringV2:
      r.add(make_abstaining_verifier(Task::RandomizedHalting));
      return build_turing_program_v2(r, "abstain");
    case Construction::TuringTV2:
      r.add(make_abstaining_verifier(Task::TimeBounded));
      return build_turing_T_v2(r, "abstain", 1'000);
    default:
      throw std::invalid_argument("construction has no dispatch overhead: " + std::string(to_string(c)));
  }
}

}  // namespace

std::string_view to_string(Construction c) {
  switch (c) {
    case Construction::Godel: return "godel";
    case Construction::Turing: return "turing";
    case Construction::TuringT: return "turing_T";
    case Construction::TuringV2: return "turing_v2";
    case Construction::TuringTV2: return "turing_T_v2";
    case Construction::GodelRandom: return "godel_random";
  }
  return "?";
}

Program build_godel_program(const Registry& registry, std::string_view verifier_id) {
  require(registry, verifier_id, {Task::ProgVerification});
  const std::string id(verifier_id);
  // (var p) and (var t) name the two halves of the input pair.
  const std::string src =
      "(program (pair program trace)"
      " (let p (fst (var x)) (let t (snd (var x))"
      "  (if (check-trace " + id + " (var p) (var t))"
      "   (if (eq (trace-final-verdict (var t)) (verdict well-behaved))"
      "    (if (typecheck-input (var p) (pair (var p) (var t)))"
      "     (return (concat (str \"Not \") (eval (var p) (pair (var p) (var t)))))"
      "     (return (int 0)))"
      "    (return (int 0)))"
      "   (return (int 0))))))";
  return parse(src);
}

Program build_turing_program(const Registry& registry, std::string_view verifier_id) {
  require(registry, verifier_id, {Task::InstanceHalting});
  return parse(dispatch(verifier_id, "", Verdict::DoesNotHalt, false));
}

Program build_turing_T(const Registry& registry, std::string_view verifier_id, std::uint64_t T) {
  require(registry, verifier_id, {Task::TimeBounded});
  Program p = parse(dispatch(verifier_id, time_arg(T), Verdict::DoesNotHaltWithinT, false));
  const std::uint64_t c = dispatch_overhead(p);
  if (T < c) {
    throw BudgetTooSmall("time limit " + std::to_string(T) + " is below the dispatch overhead " + std::to_string(c));
  }
  return p;
}

Program build_turing_program_v2(const Registry& registry, std::string_view verifier_id) {
  require(registry, verifier_id, {Task::RandomizedHalting});
  return parse(dispatch(verifier_id, "", Verdict::AlwaysHalts, true));
}

Program build_turing_T_v2(const Registry& registry, std::string_view verifier_id, std::uint64_t T) {
  require(registry, verifier_id, {Task::TimeBounded});
  if (T == 0) throw BudgetTooSmall("time limit must be positive");
  // The overhead does not depend on the literal's value.
  const std::uint64_t c =
      dispatch_overhead(parse(dispatch(verifier_id, time_arg(0), Verdict::HaltsWithinT, true)));
  return parse(dispatch(verifier_id, time_arg(T + c), Verdict::HaltsWithinT, true));
}

Program build_godel_program_random(const Registry& registry, std::string_view verifier_id,
                                   std::uint64_t delta_num, std::uint64_t delta_den, std::uint64_t pull_cap) {
  const VerifierSpec& spec = require(registry, verifier_id, {Task::ProgVerification, Task::InstanceHalting});
  if (delta_num == 0 || delta_den == 0 || delta_num >= delta_den) {
    throw std::invalid_argument("confidence parameter must lie in (0, 1)");
  }
  if (pull_cap == 0) throw std::invalid_argument("pull cap must be positive");
  const std::string id(verifier_id);
  const std::string terminates(to_string(positive_verdict(spec.task)));
  const std::string arm2 = "(if (eq (oracle " + id + " (var x) (var x)) (verdict " + terminates +
                           ")) (int 1) (int 0))";
  const std::string src = "(program program (if (eq (best-arm " + std::to_string(delta_num) + " " +
                          std::to_string(delta_den) + " " + std::to_string(pull_cap) +
                          " (bernoulli 1 2) " + arm2 + ") (int 2)) (while-true (seq)) (return (int 0))))";
  return parse(src);
}

std::pair<Program, Value> self_instance(const Program& p) { return apply_self(p); }

std::uint64_t static_overhead(Construction c) { return dispatch_overhead(shape_of(c)); }

std::uint64_t measure_overhead_c(Construction c, std::uint64_t T, std::uint64_t stub_steps) {
  Registry r;
  Program p;
  switch (c) {
    case Construction::Turing: {
      const auto& s = r.add(make_constant_verifier(Task::InstanceHalting, Verdict::DoesNotHalt, stub_steps));
      p = build_turing_program(r, s.id);
      break;
    }
    case Construction::TuringT: {
      const auto& s = r.add(make_constant_verifier(Task::TimeBounded, Verdict::DoesNotHaltWithinT, stub_steps));
      p = build_turing_T(r, s.id, T);
      break;
    }
    case Construction::TuringV2: {
      const auto& s = r.add(make_constant_verifier(Task::RandomizedHalting, Verdict::DontKnow, stub_steps));
      p = build_turing_program_v2(r, s.id);
      break;
    }
    case Construction::TuringTV2: {
      const auto& s = r.add(make_constant_verifier(Task::TimeBounded, Verdict::DontKnow, stub_steps));
      p = build_turing_T_v2(r, s.id, T);
      break;
    }
    default:
      throw std::invalid_argument("construction has no dispatch overhead: " + std::string(to_string(c)));
  }
  const auto [prog, input] = self_instance(p);
  RunOptions options;
  options.detect_cycles = false;
  const RunResult res = run(prog, input, Fuel{kUnlimited, OraclePolicy::Metered}, 0, r, options);
  if (!res.report.halted() || res.report.steps < stub_steps) {
    throw std::logic_error("overhead measurement did not take the halting path");
  }
  return res.report.steps - stub_steps;
}

std::string_view to_string(Behaviour b) {
  switch (b) {
    case Behaviour::HaltZero: return "halt-0";
    case Behaviour::HaltOther: return "halt-other";
    case Behaviour::CertifiedLoop: return "certified-loop";
    case Behaviour::EvalRegress: return "eval-regress";
    case Behaviour::Exhausted: return "exhausted";
  }
  return "?";
}

Behaviour classify(const RunResult& r) {
  const auto& rep = r.report;
  if (rep.halted()) {
    return rep.value.is(Value::Kind::Int) && rep.value.as_int() == 0 ? Behaviour::HaltZero : Behaviour::HaltOther;
  }
  if (rep.cycled()) return Behaviour::CertifiedLoop;
  // A regress keeps pushing evaluation boundaries it never pops.
  if (r.max_eval_depth > 2 && r.eval_depth == r.max_eval_depth) return Behaviour::EvalRegress;
  return Behaviour::Exhausted;
}

}  // namespace diagforge
