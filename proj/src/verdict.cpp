#include "diagforge/verdict.hpp"

#include <array>
#include <utility>

namespace diagforge {
namespace {

constexpr std::array<std::pair<Verdict, std::string_view>, 10> kVerdictNames{{
    {Verdict::WellBehaved, "well-behaved"},
    {Verdict::NotWellBehaved, "not-well-behaved"},
    {Verdict::Halts, "halts"},
    {Verdict::DoesNotHalt, "does-not-halt"},
    {Verdict::HaltsWithinT, "halts-within-t"},
    {Verdict::DoesNotHaltWithinT, "does-not-halt-within-t"},
    {Verdict::AlwaysHalts, "always-halts"},
    {Verdict::HaltsOnSomeRandomness, "halts-on-some-randomness"},
    {Verdict::NeverHalts, "never-halts"},
    {Verdict::DontKnow, "dont-know"},
}};

constexpr std::array<std::pair<Task, std::string_view>, 4> kTaskNames{{
    {Task::ProgVerification, "prog-verification"},
    {Task::InstanceHalting, "instance-halting"},
    {Task::TimeBounded, "time-bounded"},
    {Task::RandomizedHalting, "randomized-halting"},
}};

}  // namespace

std::string_view to_string(Verdict v) {
  for (const auto& [verdict, name] : kVerdictNames) {
    if (verdict == v) return name;
  }
  return "dont-know";
}

std::optional<Verdict> parse_verdict(std::string_view text) {
  for (const auto& [verdict, name] : kVerdictNames) {
    if (name == text) return verdict;
  }
  return std::nullopt;
}

std::string_view to_string(Task t) {
  for (const auto& [task, name] : kTaskNames) {
    if (task == t) return name;
  }
  return "instance-halting";
}

std::optional<Task> parse_task(std::string_view text) {
  for (const auto& [task, name] : kTaskNames) {
    if (name == text) return task;
  }
  return std::nullopt;
}

bool in_family(Verdict v, Task t) {
  if (v == Verdict::DontKnow) return true;
  switch (t) {
    case Task::ProgVerification:
      return v == Verdict::WellBehaved || v == Verdict::NotWellBehaved;
    case Task::InstanceHalting:
      return v == Verdict::Halts || v == Verdict::DoesNotHalt;
    case Task::TimeBounded:
      return v == Verdict::HaltsWithinT || v == Verdict::DoesNotHaltWithinT;
    case Task::RandomizedHalting:
      return v == Verdict::AlwaysHalts || v == Verdict::HaltsOnSomeRandomness ||
             v == Verdict::NeverHalts;
  }
  return false;
}

Verdict positive_verdict(Task t) {
  switch (t) {
    case Task::ProgVerification: return Verdict::WellBehaved;
    case Task::InstanceHalting: return Verdict::Halts;
    case Task::TimeBounded: return Verdict::HaltsWithinT;
    case Task::RandomizedHalting: return Verdict::AlwaysHalts;
  }
  return Verdict::DontKnow;
}

Verdict negative_verdict(Task t) {
  switch (t) {
    case Task::ProgVerification: return Verdict::NotWellBehaved;
    case Task::InstanceHalting: return Verdict::DoesNotHalt;
    case Task::TimeBounded: return Verdict::DoesNotHaltWithinT;
    case Task::RandomizedHalting: return Verdict::NeverHalts;
  }
  return Verdict::DontKnow;
}

}  // namespace diagforge
