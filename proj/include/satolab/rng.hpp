#pragma once

#include <cstdint>

namespace satolab {

/// SplitMix64 finalizer; a bijection on 64-bit words with full avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Maps 64 random bits to a double in the open interval (0, 1).
constexpr double to_unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Counter-based random stream. A stream is identified by a 64-bit key; the
/// k-th variate is a pure function of (key, k), so any draw can be addressed
/// directly and streams can be split without coordination between threads.
class RngStream {
 public:
  constexpr explicit RngStream(std::uint64_t key, std::uint64_t counter = 0)
      : key_(key), counter_(counter) {}

  /// Stream for (seed, id): distinct ids give statistically independent streams.
  static constexpr RngStream derive(std::uint64_t seed, std::uint64_t id) {
    return RngStream(mix64(seed ^ mix64(id ^ 0x5851f42d4c957f2dULL)));
  }

  constexpr RngStream split(std::uint64_t id) const { return derive(key_, id); }

  constexpr std::uint64_t bits_at(std::uint64_t k) const {
    return mix64(key_ ^ mix64(k + 0x2545f4914f6cdd1dULL));
  }
  constexpr double uniform_at(std::uint64_t k) const { return to_unit_open(bits_at(k)); }

  constexpr std::uint64_t next_bits() { return bits_at(counter_++); }
  constexpr double next_uniform() { return uniform_at(counter_++); }

  constexpr std::uint64_t key() const { return key_; }
  constexpr std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace satolab
