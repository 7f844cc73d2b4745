#include "diagforge/harness.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "toml.hpp"

#include "diagforge/bandit.hpp"
#include "diagforge/corpus.hpp"
#include "diagforge/diagonal.hpp"
#include "diagforge/json.hpp"
#include "diagforge/parallel.hpp"
#include "diagforge/reductions.hpp"
#include "diagforge/syntax.hpp"

namespace diagforge {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Shared helpers

struct Setup {
  Registry registry;
  const VerifierSpec* spec = nullptr;
};

bool safe_builtin(const VerifierSpec& s) {
  return s.kind == VerifierKind::BoundedSim || (s.kind == VerifierKind::Stub && s.stub_verdict == Verdict::DontKnow);
}

Setup make_setup(const ExperimentConfig& cfg, const std::string& fallback, Task task) {
  Setup s;
  try {
    s.spec = &s.registry.add(parse_verifier(cfg.verifier.value_or(fallback), task));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("verifier: ") + e.what());
  }
  return s;
}

std::uint64_t trials_or(const ExperimentConfig& cfg, std::uint64_t fallback) {
  const auto t = cfg.trials.value_or(fallback);
  if (t == 0) throw ConfigError("trials must be positive");
  return t;
}

std::uint64_t T_or(const ExperimentConfig& cfg, std::uint64_t fallback) {
  const auto t = cfg.T.value_or(fallback);
  if (t == 0) throw ConfigError("T must be positive");
  return t;
}

json verifier_json(const VerifierSpec& s) {
  return {{"id", s.id},
          {"task", to_string(s.task)},
          {"internal_budget", s.internal_budget},
          {"randomized", s.randomized},
          {"claimed_safe", s.claimed_safe}};
}

json answer_json(const VerifierAnswer& a, bool with_trace) {
  json out{{"verdict", to_string(a.verdict)}, {"steps_used", a.steps_used}, {"trace_length", a.trace->step_hashes().size()}};
  if (with_trace) out["trace"] = trace_to_json(*a.trace);
  return out;
}

json cycle_json(const CycleCertificate& c, bool verified) {
  return {{"kind", "cycle"},
          {"program", serialize(c.program)},
          {"input", value_to_json(c.input)},
          {"seed", c.seed},
          {"policy", to_string(c.policy)},
          {"prefix_len", c.prefix_len},
          {"cycle_len", c.cycle_len},
          {"verified", verified}};
}

json halt_json(const Program& p, const Value& input, std::uint64_t seed, OraclePolicy policy, const HaltReport& r,
               bool verified) {
  return {{"kind", "halt-witness"},
          {"program", serialize(p)},
          {"input", value_to_json(input)},
          {"seed", seed},
          {"policy", to_string(policy)},
          {"steps", r.steps},
          {"value", value_to_json(r.value)},
          {"verified", verified}};
}

// Re-runs a halting run and checks it ends the same way.
bool recheck_halt(const Program& p, const Value& input, std::uint64_t seed, OraclePolicy policy, const HaltReport& r,
                  const OracleBinding& oracles) {
  RunOptions options;
  options.detect_cycles = false;
  const RunResult again = run(p, input, Fuel{r.steps == 0 ? 1 : r.steps, policy}, seed, oracles, options);
  return again.report.halted() && again.report.steps == r.steps && again.report.value == r.value;
}

struct Evidence {
  json certificate;
  bool verified = false;
};

// Certificate for whatever a finished run established, if anything.
std::optional<Evidence> evidence_for(const Program& p, const Value& input, std::uint64_t seed, OraclePolicy policy,
                                     const RunResult& r, const OracleBinding& oracles) {
  if (r.report.halted()) {
    const bool ok = recheck_halt(p, input, seed, policy, r.report, oracles);
    return Evidence{halt_json(p, input, seed, policy, r.report, ok), ok};
  }
  if (r.report.cycled()) {
    const CycleCertificate c{p, input, seed, policy, r.report.prefix_len, r.report.cycle_len};
    const bool ok = verify_cycle_certificate(c, oracles);
    return Evidence{cycle_json(c, ok), ok};
  }
  return std::nullopt;
}

Summary combine(const std::vector<Summary>& parts) {
  if (parts.empty()) return Summary::Inconclusive;
  if (std::find(parts.begin(), parts.end(), Summary::ExhibitsUnsafety) != parts.end()) return Summary::ExhibitsUnsafety;
  if (std::all_of(parts.begin(), parts.end(), [](Summary s) { return s == Summary::ConfirmsTheorem; })) {
    return Summary::ConfirmsTheorem;
  }
  return Summary::Inconclusive;
}

struct Builder {
  ExperimentReport report;
  json per_seed = json::array();
  json certificates = json::array();
  std::vector<Summary> outcomes;

  void add_seed(json row, Summary s) {
    row["outcome"] = to_string(s);
    per_seed.push_back(std::move(row));
    outcomes.push_back(s);
  }
  // Adds a certificate; any unverified one blocks a confirming summary.
  void certify(const Evidence& e) {
    certificates.push_back(e.certificate);
    if (!e.verified) outcomes.push_back(Summary::Inconclusive);
  }
  ExperimentReport finish(const ExperimentConfig& cfg, const VerifierSpec* spec, json details) {
    report.summary = combine(outcomes);
    report.targets_unsafe = spec != nullptr && !safe_builtin(*spec);
    json body;
    body["schema_version"] = 1;
    body["experiment"] = cfg.experiment;
    body["config"] = config_to_json(cfg);
    if (spec) body["verifier"] = verifier_json(*spec);
    body["per_seed"] = std::move(per_seed);
    body["certificates"] = std::move(certificates);
    body["details"] = std::move(details);
    body["summary"] = to_string(report.summary);
    report.body = std::move(body);
    return std::move(report);
  }
};

// ---------------------------------------------------------------------------
// Experiments

ExperimentReport demo_godel(const ExperimentConfig& cfg) {
  Setup s = make_setup(cfg, "bounded:10000", Task::ProgVerification);
  const Program g = build_godel_program(s.registry, s.spec->id);
  Builder b;
  for (auto seed : cfg.seeds) {
    const VerifierAnswer a = verify(s.registry, *s.spec, g, Value(), std::nullopt, seed);
    const bool trace_valid = validate_trace(s.registry, s.spec->id, g, *a.trace);
    const Value input = Value::pair(Value::program(g), Value::trace(a.trace));
    const RunResult r = run(g, input, Fuel{cfg.fuel, OraclePolicy::Free}, seed, s.registry);

    // Same trace with one step hash altered (or the verdict, if there are none).
    auto hashes = a.trace->step_hashes();
    Verdict final_verdict = a.trace->final_verdict();
    if (!hashes.empty()) hashes[0] ^= 1;
    else final_verdict = final_verdict == Verdict::DontKnow ? Verdict::WellBehaved : Verdict::DontKnow;
    const auto forged = std::make_shared<const Trace>(a.trace->verifier_id(), g, a.trace->input(), a.trace->time_limit(),
                                                      a.trace->random_draws(), std::move(hashes), final_verdict);
    const Value forged_input = Value::pair(Value::program(g), Value::trace(forged));
    const RunResult rf = run(g, forged_input, Fuel{cfg.fuel, OraclePolicy::Free}, seed, s.registry);

    json row{{"seed", seed},
             {"answer", answer_json(a, true)},
             {"trace_valid", trace_valid},
             {"genuine_trace_run", report_to_json(r.report)},
             {"genuine_trace_behaviour", to_string(classify(r))},
             {"max_eval_depth", r.max_eval_depth},
             {"forged_trace_valid", validate_trace(s.registry, s.spec->id, g, *forged)},
             {"forged_trace_run", report_to_json(rf.report)}};

    Summary out = Summary::Inconclusive;
    if (a.verdict == Verdict::DontKnow && classify(r) == Behaviour::HaltZero && classify(rf) == Behaviour::HaltZero) {
      auto e = evidence_for(g, input, seed, OraclePolicy::Free, r, s.registry);
      b.certify(*e);
      out = Summary::ConfirmsTheorem;
    } else if (a.verdict == Verdict::WellBehaved && trace_valid && classify(r) == Behaviour::EvalRegress) {
      // Depth evidence: the regress is deeper at double the fuel.
      const RunResult r2 = run(g, input, Fuel{2 * cfg.fuel, OraclePolicy::Free}, seed, s.registry);
      row["regress_depths"] = {r.max_eval_depth, r2.max_eval_depth};
      if (r2.max_eval_depth > r.max_eval_depth && classify(r2) == Behaviour::EvalRegress) out = Summary::ExhibitsUnsafety;
    }
    b.add_seed(std::move(row), out);
  }
  return b.finish(cfg, s.spec, {{"program", serialize(g)}});
}

ExperimentReport demo_turing(const ExperimentConfig& cfg) {
  Setup s = make_setup(cfg, "bounded:10000", Task::InstanceHalting);
  const auto [p, input] = self_instance(build_turing_program(s.registry, s.spec->id));
  Builder b;
  for (auto seed : cfg.seeds) {
    const VerifierAnswer a = verify(s.registry, *s.spec, p, input, std::nullopt, seed);
    const RunResult r = run(p, input, Fuel{cfg.fuel, OraclePolicy::Free}, seed, s.registry);
    const auto e = evidence_for(p, input, seed, OraclePolicy::Free, r, s.registry);
    Summary out = Summary::Inconclusive;
    if (e && e->verified) {
      const bool halts = r.report.halted();
      if (a.verdict == Verdict::DontKnow && !halts) out = Summary::ConfirmsTheorem;
      else if ((a.verdict == Verdict::DoesNotHalt && halts) || (a.verdict == Verdict::Halts && !halts)) out = Summary::ExhibitsUnsafety;
    }
    if (e) b.certify(*e);
    b.add_seed({{"seed", seed}, {"answer", answer_json(a, false)}, {"run", report_to_json(r.report)}}, out);
  }
  return b.finish(cfg, s.spec, {{"program", serialize(p)}});
}

ExperimentReport demo_time_bounded(const ExperimentConfig& cfg) {
  const std::uint64_t T = T_or(cfg, 1000);
  const std::uint64_t c = measure_overhead_c(Construction::TuringT, T);
  if (T <= c) throw ConfigError("T must exceed the dispatch overhead " + std::to_string(c));
  Setup s = make_setup(cfg, "bounded:" + std::to_string(T - c), Task::TimeBounded);
  Program d;
  try {
    d = build_turing_T(s.registry, s.spec->id, T);
  } catch (const BudgetTooSmall& e) {
    throw ConfigError(e.what());
  }
  const auto [p, input] = self_instance(d);
  Builder b;
  for (auto seed : cfg.seeds) {
    const VerifierAnswer a = verify(s.registry, *s.spec, p, input, T, seed);
    // Ground truth within the limit itself.
    const RunResult within = run(p, input, Fuel{T, OraclePolicy::Metered}, seed, s.registry);
    const RunResult full = run(p, input, Fuel{std::max(cfg.fuel, T), OraclePolicy::Metered}, seed, s.registry);
    const bool halted_within = within.report.halted();
    json row{{"seed", seed},
             {"answer", answer_json(a, false)},
             {"run_within_T", report_to_json(within.report)},
             {"run_within_T_stop", within.stop_reason},
             {"run_full", report_to_json(full.report)}};
    Summary out = Summary::Inconclusive;
    const auto e = evidence_for(p, input, seed, OraclePolicy::Metered, full, s.registry);
    // Running out of the T steps is reproducible by replay at fuel T.
    const bool no_halt_within = !halted_within && !run(p, input, Fuel{T, OraclePolicy::Metered}, seed, s.registry).report.halted();
    if (a.verdict == Verdict::DontKnow && no_halt_within) out = Summary::ConfirmsTheorem;
    else if (a.verdict == Verdict::DoesNotHaltWithinT && halted_within) out = Summary::ExhibitsUnsafety;
    else if (a.verdict == Verdict::HaltsWithinT && no_halt_within) out = Summary::ExhibitsUnsafety;
    if (e) b.certify(*e);
    b.add_seed(std::move(row), out);
  }
  return b.finish(cfg, s.spec, {{"T", T}, {"c", c}, {"program", serialize(p)}});
}

ExperimentReport demo_planning(const ExperimentConfig& cfg) {
  Setup s = make_setup(cfg, "bounded:10000", Task::InstanceHalting);
  const auto [p, input] = self_instance(build_turing_program(s.registry, s.spec->id));
  Builder b;
  json instance;
  for (auto seed : cfg.seeds) {
    const VerifierAnswer a = verify(s.registry, *s.spec, p, input, std::nullopt, seed);
    const PlanningInstance inst = halting_to_planning(p, input, seed, OraclePolicy::Free);
    if (instance.is_null()) instance = to_json(inst);
    const PlanningResult res = solve_planning(inst, std::min<std::uint64_t>(cfg.fuel, 100'000), s.registry);
    json row{{"seed", seed}, {"answer", answer_json(a, false)}, {"states_explored", res.states_explored}};
    Summary out = Summary::Inconclusive;
    if (res.status == PlanningResult::Status::Infeasible) {
      const bool ok = verify_certificate(inst, res.certificate, s.registry);
      json cert = to_json(res.certificate);
      cert["verified"] = ok;
      b.certify({cert, ok});
      row["planning"] = "infeasible";
      if (ok && a.verdict == Verdict::DontKnow) out = Summary::ConfirmsTheorem;
      if (ok && a.verdict == Verdict::Halts) out = Summary::ExhibitsUnsafety;
    } else if (res.status == PlanningResult::Status::Solved) {
      const bool ok = verify_plan(inst, res.plan, s.registry);
      b.certify({json{{"kind", "plan"}, {"length", res.plan.moves.size()}, {"verified", ok}}, ok});
      row["planning"] = "solved";
      row["plan_length"] = res.plan.moves.size();
      if (ok && a.verdict == Verdict::DoesNotHalt) out = Summary::ExhibitsUnsafety;
    } else {
      row["planning"] = "unknown";
    }
    b.add_seed(std::move(row), out);
  }
  return b.finish(cfg, s.spec, {{"instance", instance}});
}

ExperimentReport demo_reachability(const ExperimentConfig& cfg) {
  const std::uint64_t T = T_or(cfg, 1000);
  const std::uint64_t c = measure_overhead_c(Construction::TuringT, T);
  if (T <= c) throw ConfigError("T must exceed the dispatch overhead " + std::to_string(c));
  Setup s = make_setup(cfg, "bounded:" + std::to_string(T - c), Task::TimeBounded);
  const auto [p, input] = self_instance(build_turing_T(s.registry, s.spec->id, T));
  Builder b;
  json instance;
  for (auto seed : cfg.seeds) {
    const VerifierAnswer a = verify(s.registry, *s.spec, p, input, T, seed);
    const GraphInstance inst = tb_halting_to_reachability(p, input, T, seed, OraclePolicy::Metered);
    if (instance.is_null()) instance = to_json(inst);
    const ReachabilityResult res = solve_reachability(inst, s.registry);
    json row{{"seed", seed}, {"answer", answer_json(a, false)}, {"reachable", res.reachable}};
    Summary out = Summary::Inconclusive;
    if (!res.reachable) {
      const bool ok = verify_certificate(inst, res.certificate, s.registry);
      json cert = to_json(res.certificate);
      cert["verified"] = ok;
      b.certify({cert, ok});
      row["frontier_size"] = res.certificate.visited.size();
      if (ok && a.verdict == Verdict::DontKnow) out = Summary::ConfirmsTheorem;
      if (ok && a.verdict == Verdict::HaltsWithinT) out = Summary::ExhibitsUnsafety;
    } else {
      const bool ok = verify_path(inst, res.path, s.registry);
      b.certify({json{{"kind", "path"}, {"length", res.path.size() - 1}, {"verified", ok}}, ok});
      row["path_length"] = res.path.size() - 1;
      if (ok && a.verdict == Verdict::DoesNotHaltWithinT) out = Summary::ExhibitsUnsafety;
    }
    b.add_seed(std::move(row), out);
  }
  return b.finish(cfg, s.spec, {{"T", T}, {"c", c}, {"instance", instance}});
}

ExperimentReport demo_v2_halting(const ExperimentConfig& cfg) {
  Setup s = make_setup(cfg, "abstain", Task::RandomizedHalting);
  const auto [p, input] = self_instance(build_turing_program_v2(s.registry, s.spec->id));
  const std::uint64_t trials = trials_or(cfg, 300);
  Builder b;
  const auto est = estimate_answer_probability(s.registry, *s.spec, p, input, Verdict::AlwaysHalts, trials, cfg.seeds.front());
  for (auto seed : cfg.seeds) {
    const RunResult r = run(p, input, Fuel{cfg.fuel, OraclePolicy::Free}, seed, s.registry);
    const auto e = evidence_for(p, input, seed, OraclePolicy::Free, r, s.registry);
    Summary out = Summary::Inconclusive;
    if (e && e->verified) {
      if (r.report.halted() && est.successes == 0) out = Summary::ConfirmsTheorem;
      else if (!r.report.halted()) out = Summary::ExhibitsUnsafety;  // looped: it was told always-halts
    }
    if (e) b.certify(*e);
    b.add_seed({{"seed", seed}, {"run", report_to_json(r.report)}}, out);
  }
  json estimate{{"target", "always-halts"}, {"successes", est.successes}, {"trials", est.trials},
                {"mean", est.mean}, {"lo", est.lo}, {"hi", est.hi}};
  return b.finish(cfg, s.spec, {{"answer_probability", estimate}, {"program", serialize(p)}});
}

ExperimentReport demo_v2_time_bounded(const ExperimentConfig& cfg) {
  const std::uint64_t T = T_or(cfg, 1000);
  const std::uint64_t c = measure_overhead_c(Construction::TuringTV2, T);
  Setup s = make_setup(cfg, "bounded:" + std::to_string(T), Task::TimeBounded);
  const auto [p, input] = self_instance(build_turing_T_v2(s.registry, s.spec->id, T));
  const std::uint64_t trials = trials_or(cfg, 300);
  Builder b;
  const auto est = estimate_answer_probability(s.registry, *s.spec, p, input, Verdict::HaltsWithinT, trials,
                                               cfg.seeds.front(), T + c);
  for (auto seed : cfg.seeds) {
    const RunResult r = run(p, input, Fuel{std::max(cfg.fuel, T + c), OraclePolicy::Metered}, seed, s.registry);
    const auto e = evidence_for(p, input, seed, OraclePolicy::Metered, r, s.registry);
    Summary out = Summary::Inconclusive;
    if (e && e->verified) {
      if (r.report.halted() && r.report.steps <= T + c && est.successes == 0) out = Summary::ConfirmsTheorem;
      else if (!r.report.halted()) out = Summary::ExhibitsUnsafety;
    }
    if (e) b.certify(*e);
    b.add_seed({{"seed", seed}, {"run", report_to_json(r.report)}, {"bound", T + c}}, out);
  }
  json estimate{{"target", "halts-within-t"}, {"successes", est.successes}, {"trials", est.trials},
                {"mean", est.mean}, {"lo", est.lo}, {"hi", est.hi}};
  return b.finish(cfg, s.spec, {{"T", T}, {"c", c}, {"answer_probability", estimate}, {"program", serialize(p)}});
}

ExperimentReport demo_calibration(const ExperimentConfig& cfg) {
  Setup s = make_setup(cfg, "abstain", Task::InstanceHalting);
  const std::uint64_t trials = trials_or(cfg, 300);
  if (trials < 100) throw ConfigError("calibration needs at least 100 trials");
  const Program g = build_godel_program_random(s.registry, s.spec->id, 1, 100, cfg.pull_cap);
  Builder b;
  for (auto seed : cfg.seeds) {
    const CalibrationReport rep = audit_calibration(s.registry, *s.spec, g, trials, cfg.fuel, seed);
    // Spot-check the first few runs' certificates independently.
    const auto [p, input] = apply_self(g);
    for (std::uint64_t i = 0; i < std::min<std::uint64_t>(trials, 3); ++i) {
      const RunResult r = run(p, input, Fuel{cfg.fuel, OraclePolicy::Free}, seed + i, s.registry);
      if (auto e = evidence_for(p, input, seed + i, OraclePolicy::Free, r, s.registry)) b.certify(*e);
    }
    Summary out = Summary::Inconclusive;
    if (rep.verdict == CalibrationReport::Verdict::NoClaim && rep.certified.mean >= 0.97) out = Summary::ConfirmsTheorem;
    if (rep.verdict == CalibrationReport::Verdict::Violated) out = Summary::ExhibitsUnsafety;
    json row = to_json(rep);
    row["seed"] = seed;
    b.add_seed(std::move(row), out);
  }
  return b.finish(cfg, s.spec, {{"program", serialize(g)}, {"pull_cap", cfg.pull_cap}});
}

ExperimentReport safety_audit(const ExperimentConfig& cfg) {
  Task task = Task::InstanceHalting;
  if (cfg.task) {
    const auto t = parse_task(*cfg.task);
    if (!t) throw ConfigError("unknown task '" + *cfg.task + "'");
    task = *t;
  }
  if (cfg.corpus_size > 200) throw ConfigError("corpus size must be at most 200");
  std::optional<std::uint64_t> limit;
  if (task == Task::TimeBounded) limit = T_or(cfg, 50);
  Setup s = make_setup(cfg, "bounded:10000", task);
  Builder b;
  for (auto seed : cfg.seeds) {
    const auto corpus = build_corpus(cfg.corpus_size, seed);
    const auto entries = entries_of(corpus);
    const SafetyAuditReport rep = audit_safety(s.registry, *s.spec, entries, kCorpusCertifyBudget, limit);
    json claims = json::array();
    for (const auto& f : rep.false_claims) {
      claims.push_back({{"program_id", f.program_id},
                        {"claimed", to_string(f.claimed)},
                        {"ground_truth", report_to_json(f.truth.report)}});
    }
    b.add_seed({{"seed", seed},
                {"corpus_size", rep.corpus_size},
                {"undetermined", rep.undetermined},
                {"abstentions", rep.abstentions},
                {"false_claims", std::move(claims)}},
               rep.empirically_safe() ? Summary::ConfirmsTheorem : Summary::ExhibitsUnsafety);
  }
  return b.finish(cfg, s.spec, {{"task", to_string(task)}});
}

ExperimentReport measure_c(const ExperimentConfig& cfg) {
  const std::uint64_t T = T_or(cfg, 1000);
  Builder b;
  json rows = json::array();
  for (auto c : {Construction::TuringT, Construction::TuringTV2}) {
    const std::uint64_t at_T = measure_overhead_c(c, T);
    const std::uint64_t at_big = measure_overhead_c(c, T * 1000, 7);
    const std::uint64_t stat = static_overhead(c);
    const bool stable = at_T == at_big && at_T == stat;
    b.add_seed({{"construction", to_string(c)},
                {"T", {T, T * 1000}},
                {"c", {at_T, at_big}},
                {"static", stat}},
               stable ? Summary::ConfirmsTheorem : Summary::Inconclusive);
  }
  return b.finish(cfg, nullptr, json::object());
}

ExperimentReport build_corpus_experiment(const ExperimentConfig& cfg) {
  if (cfg.corpus_size > 200) throw ConfigError("corpus size must be at most 200");
  Builder b;
  json corpora = json::array();
  for (auto seed : cfg.seeds) {
    const auto corpus = build_corpus(cfg.corpus_size, seed);
    std::size_t halting = 0;
    for (const auto& e : corpus) halting += e.truth.status == GroundTruth::Status::Halts;
    corpora.push_back({{"seed", seed}, {"halting", halting}, {"entries", to_json(corpus)}});
    b.add_seed({{"seed", seed}, {"size", corpus.size()}, {"halting", halting}}, Summary::ConfirmsTheorem);
  }
  return b.finish(cfg, nullptr, {{"corpora", std::move(corpora)}});
}

using Runner = std::function<ExperimentReport(const ExperimentConfig&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table{
      {"demo-godel", demo_godel},
      {"demo-turing", demo_turing},
      {"demo-time-bounded", demo_time_bounded},
      {"demo-planning", demo_planning},
      {"demo-reachability", demo_reachability},
      {"demo-v2-halting", demo_v2_halting},
      {"demo-v2-time-bounded", demo_v2_time_bounded},
      {"demo-calibration", demo_calibration},
      {"safety-audit", safety_audit},
      {"measure-c", measure_c},
      {"build-corpus", build_corpus_experiment},
  };
  return table;
}

}  // namespace

std::string_view to_string(Summary s) {
  switch (s) {
    case Summary::ConfirmsTheorem: return "ConfirmsTheorem";
    case Summary::ExhibitsUnsafety: return "ExhibitsUnsafety";
    case Summary::Inconclusive: return "Inconclusive";
  }
  return "?";
}

int ExperimentReport::exit_code() const {
  if (summary == Summary::ConfirmsTheorem) return 0;
  if (summary == Summary::ExhibitsUnsafety && targets_unsafe) return 0;
  return 1;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : runners()) out.push_back(name);
    return out;
  }();
  return names;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  const auto it = runners().find(cfg.experiment);
  if (it == runners().end()) throw UnknownExperiment(cfg.experiment);
  if (cfg.seeds.empty()) throw ConfigError("at least one seed is required");
  if (cfg.fuel == 0) throw ConfigError("fuel must be positive");
  if (cfg.pull_cap == 0) throw ConfigError("pull_cap must be positive");
  try {
    return it->second(cfg);
  } catch (const UnknownVerifier& e) {
    throw ConfigError(e.what());
  } catch (const BudgetTooSmall& e) {
    throw ConfigError(e.what());
  }
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(s, &used);
      if (used != s.size() || s.empty() || s[0] == '-') throw std::invalid_argument(s);
      return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
      throw ConfigError("bad seed '" + s + "'");
    }
  };
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string part = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto dots = part.find("..");
    if (dots != std::string::npos) {
      const auto lo = number(part.substr(0, dots));
      const auto hi = number(part.substr(dots + 2));
      if (hi < lo || hi - lo >= 1'000'000) throw ConfigError("bad seed range '" + part + "'");
      for (auto v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(number(part));
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
  toml::table tbl;
  try {
    tbl = toml::parse_file(path);
  } catch (const toml::parse_error& e) {
    throw ConfigError("config file " + path + ": " + std::string(e.description()));
  }
  auto count = [&](const char* key, auto& field) {
    if (const auto* node = tbl.get(key)) {
      const auto v = node->value<std::int64_t>();
      if (!v || *v < 0) throw ConfigError(std::string("config key '") + key + "' must be a non-negative integer");
      field = static_cast<std::uint64_t>(*v);
    }
  };
  auto text = [&](const char* key, auto& field) {
    if (const auto* node = tbl.get(key)) {
      const auto v = node->value<std::string>();
      if (!v) throw ConfigError(std::string("config key '") + key + "' must be a string");
      field = *v;
    }
  };
  static const char* const kKnown[] = {"verifier", "task", "seed", "seeds", "fuel", "T", "trials", "pull_cap", "corpus_size", "out"};
  for (const auto& [key, node] : tbl) {
    if (std::find(std::begin(kKnown), std::end(kKnown), key.str()) == std::end(kKnown)) {
      throw ConfigError("unknown config key '" + std::string(key.str()) + "'");
    }
  }
  text("verifier", base.verifier);
  text("task", base.task);
  text("out", base.out_path);
  count("fuel", base.fuel);
  count("T", base.T);
  count("trials", base.trials);
  count("pull_cap", base.pull_cap);
  count("corpus_size", base.corpus_size);
  for (const char* key : {"seed", "seeds"}) {
    const auto* node = tbl.get(key);
    if (!node) continue;
    if (const auto* arr = node->as_array()) {
      base.seeds.clear();
      for (const auto& item : *arr) {
        const auto v = item.value<std::int64_t>();
        if (!v || *v < 0) throw ConfigError("seeds must be non-negative integers");
        base.seeds.push_back(static_cast<std::uint64_t>(*v));
      }
    } else if (const auto v = node->value<std::int64_t>(); v && *v >= 0) {
      base.seeds = {static_cast<std::uint64_t>(*v)};
    } else if (const auto s = node->value<std::string>()) {
      base.seeds = parse_seed_list(*s);
    } else {
      throw ConfigError(std::string("config key '") + key + "' must be an integer, list or string");
    }
  }
  return base;
}

json config_to_json(const ExperimentConfig& cfg) {
  json out{{"experiment", cfg.experiment},
           {"seeds", cfg.seeds},
           {"fuel", cfg.fuel},
           {"pull_cap", cfg.pull_cap},
           {"corpus_size", cfg.corpus_size}};
  out["verifier"] = cfg.verifier ? json(*cfg.verifier) : json(nullptr);
  out["task"] = cfg.task ? json(*cfg.task) : json(nullptr);
  out["T"] = cfg.T ? json(*cfg.T) : json(nullptr);
  out["trials"] = cfg.trials ? json(*cfg.trials) : json(nullptr);
  out["out"] = cfg.out_path;
  return out;
}

}  // namespace diagforge
