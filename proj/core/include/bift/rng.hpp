#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace bift {

// Deterministic random source. The engine is std::mt19937_64 (bit-exact by
// the standard); the value transforms live here because the stdlib
// distributions are implementation-defined and would not survive a
// checkpoint round-trip across library versions.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi] via rejection-free modulo of a wide draw.
  int64_t uniform_int(int64_t lo, int64_t hi);

  // Standard normal via Box-Muller.
  double normal();

  // Normal truncated to [-2*stddev, 2*stddev] by resampling.
  double truncated_normal(double stddev);

  // Fisher-Yates shuffle of indices [0, n).
  std::vector<int64_t> permutation(int64_t n);

  // Engine state as text, round-trips exactly.
  std::string state() const;
  void set_state(const std::string& s);

  // Derive an independent stream for (seed, lane) pairs, e.g. per-sample
  // generation. splitmix64 mixing avoids correlated mt19937 seeds.
  static uint64_t mix(uint64_t seed, uint64_t lane);

 private:
  std::mt19937_64 eng_;
};

}  // namespace bift
