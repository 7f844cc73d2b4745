#include "diagforge/schedule.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "diagforge/hash.hpp"

namespace diagforge {

EliminationSchedule::EliminationSchedule(std::uint64_t delta_num, std::uint64_t delta_den,
                                         std::uint64_t pull_cap)
    : delta_num_(delta_num), delta_den_(delta_den), cap_(pull_cap) {
  if (delta_num == 0 || delta_den == 0 || 2 * delta_num >= delta_den) {
    throw std::invalid_argument("confidence must lie in (0, 1/2)");
  }
  if (pull_cap == 0) throw std::invalid_argument("pull cap must be positive");
  target_ = epoch_target(epoch_, delta());
}

double EliminationSchedule::delta() const {
  return static_cast<double>(delta_num_) / static_cast<double>(delta_den_);
}

std::uint64_t EliminationSchedule::epoch_target(std::uint64_t epoch, double delta) {
  const double r = static_cast<double>(epoch);
  const double delta_r = 6.0 * delta / (std::numbers::pi * std::numbers::pi * r * r);
  const double eps = std::ldexp(1.0, -static_cast<int>(epoch));
  const double n = std::ceil(8.0 * std::log(2.0 / delta_r) / (eps * eps));
  if (!(n < 9.0e18)) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(n);
}

EliminationSchedule::Action EliminationSchedule::next() {
  while (true) {
    if (target_ > cap_) return Action::CapExceeded;
    if (pulls1_ < target_) return Action::PullArm1;
    if (pulls2_ < target_) return Action::PullArm2;
    // Both arms have exactly target_ pulls, so the mean gap exceeds 2^-r
    // iff |wins1 - wins2| * 2^r > target_ (exact in long double).
    const std::uint64_t diff = wins1_ > wins2_ ? wins1_ - wins2_ : wins2_ - wins1_;
    const long double scaled = std::ldexp(static_cast<long double>(diff), static_cast<int>(epoch_));
    if (scaled > static_cast<long double>(target_)) {
      return wins1_ > wins2_ ? Action::Arm1Wins : Action::Arm2Wins;
    }
    ++epoch_;
    target_ = epoch_target(epoch_, delta());
  }
}

void EliminationSchedule::record(int arm, bool reward) {
  if (arm == 1) {
    ++pulls1_;
    wins1_ += reward ? 1 : 0;
  } else {
    ++pulls2_;
    wins2_ += reward ? 1 : 0;
  }
}

std::uint64_t EliminationSchedule::hash() const {
  std::uint64_t h = mix64(0xba5d17ULL);
  for (std::uint64_t v : {delta_num_, delta_den_, cap_, epoch_, target_, pulls1_, pulls2_, wins1_, wins2_}) {
    h = hash_combine(h, v);
  }
  return h;
}

}  // namespace diagforge
