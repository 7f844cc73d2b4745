#pragma once

#include <optional>
#include <string_view>

namespace diagforge {

/// Question families a verifier can be asked.
enum class Task {
  ProgVerification,   // does P terminate on every input
  InstanceHalting,    // does P halt on I
  TimeBounded,        // does P halt on I within T steps
  RandomizedHalting,  // always / sometimes / never halts
};

/// Every answer from every family. DontKnow belongs to all of them.
enum class Verdict {
  WellBehaved,
  NotWellBehaved,
  Halts,
  DoesNotHalt,
  HaltsWithinT,
  DoesNotHaltWithinT,
  AlwaysHalts,
  HaltsOnSomeRandomness,
  NeverHalts,
  DontKnow,
};

std::string_view to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view text);

std::string_view to_string(Task t);
std::optional<Task> parse_task(std::string_view text);

bool in_family(Verdict v, Task t);

/// The "it terminates" answer of a family (WellBehaved, Halts, ...).
Verdict positive_verdict(Task t);
/// The "it does not terminate" answer of a family.
Verdict negative_verdict(Task t);

}  // namespace diagforge
