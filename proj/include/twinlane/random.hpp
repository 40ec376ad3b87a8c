#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace twinlane {

/// Stateless counter-based generator: every draw is a pure function of
/// (key, counter), so evaluation order never changes the sampled values.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  /// splitmix64 finalizer over the combined key/counter.
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t bits(std::uint64_t counter) const {
    return mix(mix(key_) ^ (counter * 0xd1b54a32d192ed03ULL));
  }

  /// Uniform in [0, 1).
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on counters (2i, 2i+1).
  double normal(std::uint64_t index) const {
    const double u1 = 1.0 - uniform(2 * index);  // (0, 1]
    const double u2 = uniform(2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Derives an independent key for a sub-stream.
  constexpr CounterRng fork(std::uint64_t stream) const { return CounterRng(bits(~stream)); }

 private:
  std::uint64_t key_;
};

}  // namespace twinlane
