#include "diagforge/bandit.hpp"

#include <stdexcept>

#include "diagforge/parallel.hpp"
#include "diagforge/schedule.hpp"

namespace diagforge {

Arm Arm::bernoulli(std::uint64_t num, std::uint64_t den) {
  if (den == 0 || num > den) throw std::invalid_argument("arm probability must lie in [0, 1]");
  Arm a;
  a.kind_ = Kind::Bernoulli;
  a.num_ = num;
  a.den_ = den;
  return a;
}

Arm Arm::verifier_backed(const Registry& registry, VerifierSpec spec, Program p, Value input, Verdict target) {
  Arm a;
  a.kind_ = Kind::VerifierBacked;
  a.registry_ = &registry;
  a.spec_ = std::move(spec);
  a.program_ = std::move(p);
  a.input_ = std::move(input);
  a.target_ = target;
  return a;
}

bool Arm::draw(SplitMix64& rng) const {
  if (kind_ == Kind::Bernoulli) return rng.bernoulli(num_, den_);
  LiveRandom live(rng);
  return verify_with(*registry_, spec_, program_, input_, std::nullopt, live).verdict == target_;
}

double BAIResult::mean(int arm) const {
  const int i = arm - 1;
  return pulls[i] == 0 ? 0.0 : static_cast<double>(successes[i]) / static_cast<double>(pulls[i]);
}

BAIResult identify_best(const Arm& arm1, const Arm& arm2, const BAIConfig& cfg, std::uint64_t seed) {
  if (cfg.delta_num == 0 || cfg.delta_den == 0 || 2 * cfg.delta_num >= cfg.delta_den) {
    throw std::invalid_argument("confidence parameter must lie in (0, 1/2)");
  }
  EliminationSchedule sched(cfg.delta_num, cfg.delta_den, cfg.pull_cap);
  SplitMix64 rng(seed);
  BAIResult out;
  out.seed = seed;
  while (true) {
    const auto action = sched.next();
    if (action == EliminationSchedule::Action::PullArm1) {
      sched.record(1, arm1.draw(rng));
      continue;
    }
    if (action == EliminationSchedule::Action::PullArm2) {
      sched.record(2, arm2.draw(rng));
      continue;
    }
    out.winner = action == EliminationSchedule::Action::Arm1Wins ? 1
                 : action == EliminationSchedule::Action::Arm2Wins ? 2
                                                                     : 0;
    break;
  }
  out.total_pulls = sched.total_pulls();
  for (int a = 1; a <= 2; ++a) {
    out.pulls[a - 1] = sched.pulls(a);
    out.successes[a - 1] = sched.successes(a);
  }
  return out;
}

nlohmann::json to_json(const BAIResult& r) {
  nlohmann::json winner = r.cap_exceeded() ? nlohmann::json("cap-exceeded") : nlohmann::json(r.winner);
  return {{"winner", winner}, {"pulls", r.total_pulls}, {"means", {r.mean(1), r.mean(2)}}, {"seed", r.seed}};
}

std::string_view to_string(CalibrationReport::Verdict v) {
  switch (v) {
    case CalibrationReport::Verdict::InWindow: return "in-window";
    case CalibrationReport::Verdict::Violated: return "violated";
    case CalibrationReport::Verdict::NoClaim: return "no-claim";
  }
  return "?";
}

CalibrationReport audit_calibration(const Registry& registry, const VerifierSpec& spec, const Program& p,
                                    std::uint64_t trials, std::uint64_t fuel_per_run, std::uint64_t seed) {
  if (trials < 100) throw std::invalid_argument("calibration audit needs at least 100 trials");
  const auto [prog, input] = apply_self(p);
  CalibrationReport rep;
  rep.claimed = estimate_answer_probability(registry, spec, prog, input, positive_verdict(spec.task), trials, seed);

  const auto outcomes = parallel_map(trials, [&](std::size_t i) {
    return run(prog, input, Fuel{fuel_per_run, OraclePolicy::Free}, seed + i, registry).report.outcome;
  });
  for (auto o : outcomes) {
    if (o == HaltReport::Outcome::Halted) ++rep.halted;
    else if (o == HaltReport::Outcome::CycleCertificate) ++rep.cycled;
    else ++rep.undetermined;
  }
  rep.certified = wilson_interval(rep.halted, trials);
  // Undetermined runs could go either way.
  rep.certified_lo = rep.certified.lo;
  rep.certified_hi = wilson_interval(rep.halted + rep.undetermined, trials).hi;

  if (rep.claimed.successes == 0) {
    rep.verdict = CalibrationReport::Verdict::NoClaim;
  } else {
    const double lo = rep.claimed.lo - rep.window;
    const double hi = rep.claimed.hi + rep.window;
    const bool disjoint = rep.certified_hi < lo || rep.certified_lo > hi;
    rep.verdict = disjoint ? CalibrationReport::Verdict::Violated : CalibrationReport::Verdict::InWindow;
  }
  return rep;
}

nlohmann::json to_json(const CalibrationReport& r) {
  auto est = [](const ProbabilityEstimate& e) {
    return nlohmann::json{{"successes", e.successes}, {"trials", e.trials}, {"mean", e.mean}, {"lo", e.lo}, {"hi", e.hi}};
  };
  return {{"claimed", est(r.claimed)},
          {"certified", est(r.certified)},
          {"certified_interval", {r.certified_lo, r.certified_hi}},
          {"halted", r.halted},
          {"cycled", r.cycled},
          {"undetermined", r.undetermined},
          {"window", r.window},
          {"verdict", to_string(r.verdict)}};
}

}  // namespace diagforge
