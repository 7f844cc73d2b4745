#pragma once

#include <cstdint>
#include <string_view>

namespace diagforge {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
  return mix64(seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

// FNV-1a over the bytes, finalized with mix64. Stable across platforms.
constexpr std::uint64_t hash_bytes(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

/// SplitMix64 generator. The whole state is one word, so it can be hashed
/// and compared as part of an interpreter configuration.
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  constexpr explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  constexpr std::uint64_t next() {
    std::uint64_t z = (state_ += kGamma);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// One draw; true with probability num/den (exact up to 2^-64).
  constexpr bool bernoulli(std::uint64_t num, std::uint64_t den) {
    const unsigned __int128 scaled = static_cast<unsigned __int128>(next()) * den;
    return static_cast<std::uint64_t>(scaled >> 64) < num;
  }

  /// Independent child stream; advances this one by a single draw.
  constexpr SplitMix64 split() { return SplitMix64(mix64(next())); }

  constexpr std::uint64_t state() const { return state_; }

  friend constexpr bool operator==(const SplitMix64&, const SplitMix64&) = default;

 private:
  std::uint64_t state_;
};

}  // namespace diagforge
