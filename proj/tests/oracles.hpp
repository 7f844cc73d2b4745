#pragma once

// Independent reference computations the library is checked against. None
// of these call into the interpreter.

#include <cmath>
#include <cstdint>
#include <string_view>

namespace oracle {

// Steps a loop-free, branch-free body costs: the machine enters every node
// once, so this is the number of opening parentheses in its canonical text.
inline std::uint64_t straight_line_steps(std::string_view canonical) {
  std::uint64_t n = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < canonical.size(); ++i) {
    const char c = canonical[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
    } else if (c == '"') {
      in_string = true;
    } else if (c == '(') {
      ++n;
    }
  }
  return n;
}

// n_r = ceil(8 ln(2 / delta_r) / eps_r^2), delta_r = 6 delta / (pi^2 r^2).
inline std::uint64_t epoch_target(std::uint64_t r, double delta) {
  const double pi = 3.14159265358979323846;
  const double delta_r = 6.0 * delta / (pi * pi * static_cast<double>(r * r));
  const double eps = std::ldexp(1.0, -static_cast<int>(r));
  return static_cast<std::uint64_t>(std::ceil(8.0 * std::log(2.0 / delta_r) / (eps * eps)));
}

// Wilson score interval.
struct Interval {
  double lo, hi;
};
inline Interval wilson(double k, double n, double z = 1.959963984540054) {
  const double p = k / n;
  const double denom = 1 + z * z / n;
  const double centre = (p + z * z / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
  return {centre - half, centre + half};
}

}  // namespace oracle
