#pragma once

#include <cstdint>

namespace diagforge {

/// Two-arm successive-elimination schedule for best-arm identification.
///
/// Epoch r = 1, 2, ... uses accuracy eps_r = 2^-r and confidence
/// delta_r = 6 delta / (pi^2 r^2). Each arm is pulled until its cumulative
/// count reaches n_r = ceil(8 ln(2 / delta_r) / eps_r^2); the leader is
/// declared once the empirical means differ by more than eps_r. Schedules
/// whose next target exceeds the per-arm pull cap stop with CapExceeded.
///
/// The schedule is a small value type so the interpreter can keep it inside
/// a continuation frame and hash/compare it with the rest of the state.
class EliminationSchedule {
 public:
  enum class Action : std::uint8_t { PullArm1, PullArm2, Arm1Wins, Arm2Wins, CapExceeded };

  EliminationSchedule() = default;
  EliminationSchedule(std::uint64_t delta_num, std::uint64_t delta_den, std::uint64_t pull_cap);

  /// Decides what happens next, advancing epochs as needed.
  Action next();
  /// Records the reward of a pull requested by next().
  void record(int arm, bool reward);

  std::uint64_t epoch() const { return epoch_; }
  std::uint64_t pulls(int arm) const { return arm == 1 ? pulls1_ : pulls2_; }
  std::uint64_t successes(int arm) const { return arm == 1 ? wins1_ : wins2_; }
  std::uint64_t total_pulls() const { return pulls1_ + pulls2_; }
  std::uint64_t pull_cap() const { return cap_; }
  double delta() const;

  std::uint64_t hash() const;
  friend bool operator==(const EliminationSchedule&, const EliminationSchedule&) = default;

  /// n_r for the given epoch and overall confidence.
  static std::uint64_t epoch_target(std::uint64_t epoch, double delta);

 private:
  std::uint64_t delta_num_ = 1;
  std::uint64_t delta_den_ = 100;
  std::uint64_t cap_ = 1000000;
  std::uint64_t epoch_ = 1;
  std::uint64_t target_ = 0;
  std::uint64_t pulls1_ = 0;
  std::uint64_t pulls2_ = 0;
  std::uint64_t wins1_ = 0;
  std::uint64_t wins2_ = 0;
};

}  // namespace diagforge
