#pragma once

#include <cstdint>

namespace mplab {

// Counter-based deterministic random numbers built on the SplitMix64
// finalizer (Steele, Lea & Flood, "Fast splittable pseudorandom number
// generators", OOPSLA 2014). Every draw is a pure function of explicit
// 64-bit words, so results are reproducible across platforms and
// independent of evaluation order.

// SplitMix64 output function. Bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from (master, stream, counter).
// Two-level finalizer chain: each level is injective in its own argument.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t counter) {
  const std::uint64_t s1 = mix64(master ^ (0x9E3779B97F4A7C15ull * (stream + 1)));
  return mix64(s1 ^ (0x9E3779B97F4A7C15ull * (counter + 1)));
}

// Uniform double in [0, 1) from the top 53 bits of a word.
inline double uniform01(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Minimal counter RNG: successive draws are mix64(seed), mix64(seed+1), ...
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() { return mix64(seed_ + counter_++); }
  double next_uniform() { return uniform01(next_u64()); }
  // Uniform in [lo, hi).
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_uniform();
  }
  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(next_uniform() * static_cast<double>(n)) % n;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace mplab
