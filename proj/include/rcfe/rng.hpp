#ifndef RCFE_RNG_HPP
#define RCFE_RNG_HPP

#include <cstdint>

namespace rcfe {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// splitmix64: a counter-style generator with 64-bit state. Output words are
/// a strong mix of a golden-gamma counter, so independently seeded streams
/// are effectively disjoint; results do not depend on the platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }

  // Unbiased integer in [0, bound) via bitmask rejection.
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    std::uint64_t mask = bound - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    while (true) {
      const std::uint64_t v = next() & mask;
      if (v < bound) return v;
    }
  }

  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// Per-trial substream: the schedule of parallel trials cannot change what
// any single trial draws.
inline SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
  return SplitMix64(mix64(seed ^ (0x9E3779B97F4A7C15ull * (trial + 1))));
}

}  // namespace rcfe

#endif  // RCFE_RNG_HPP
