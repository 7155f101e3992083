#pragma once

#include <cstdint>

namespace binlot {

// Counter-based deterministic generator (splitmix64 finalizer over a keyed
// counter).  Output i depends only on (key, i), so substreams obtained via
// split() are independent of evaluation order; parallel trials keyed by
// (master seed, trial index) reproduce bit-for-bit at any job count.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : key_(mix(seed ^ kTag)) {}

  // Child stream addressed by index.  Children of distinct indices, and the
  // parent itself, never share outputs.
  SplitRng split(std::uint64_t index) const {
    return SplitRng(FromKey{}, mix(key_ ^ mix(index + kIndexTag)));
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

  // Uniform value in [0, n) via rejection; no modulo bias.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t v = next_u64();
      if (v >= threshold) return v % n;
    }
  }

  double next_unit() {  // uniform in [0, 1), 53-bit resolution
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  struct FromKey {};
  SplitRng(FromKey, std::uint64_t key) : key_(key) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kTag = 0xB5297A4D3C2A5B6Full;
  static constexpr std::uint64_t kIndexTag = 0xD1B54A32D192ED03ull;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace binlot
