#pragma once

#include <cstdint>

namespace superlin {

/// SplitMix64 stream keyed by (seed, index). Each Monte Carlo trial draws from
/// its own stream, so a trial's outcome is a pure function of the seed and
/// its index no matter which thread runs it or in what order.
class TrialStream {
 public:
  TrialStream(std::uint64_t seed, std::uint64_t index) noexcept
      : state_(mix(seed ^ mix(index + kGolden))) {}

  std::uint64_t next() noexcept {
    state_ += kGolden;
    return mix(state_);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  std::uint64_t state_;
};

}  // namespace superlin
