#include "bift/rng.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace bift {

int64_t Rng::uniform_int(int64_t lo, int64_t hi) {
  uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
  return lo + static_cast<int64_t>(next_u64() % span);
}

double Rng::normal() {
  // Box-Muller, one value per call; no cached spare so the engine state is
  // the whole RNG state.
  double u1 = uniform();
  double u2 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::truncated_normal(double stddev) {
  for (;;) {
    double z = normal();
    if (std::abs(z) <= 2.0) return z * stddev;
  }
}

std::vector<int64_t> Rng::permutation(int64_t n) {
  std::vector<int64_t> idx(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
  for (int64_t i = n - 1; i > 0; --i) {
    int64_t j = uniform_int(0, i);
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  }
  return idx;
}

std::string Rng::state() const {
  std::ostringstream os;
  os << eng_;
  return os.str();
}

void Rng::set_state(const std::string& s) {
  std::istringstream is(s);
  is >> eng_;
}

uint64_t Rng::mix(uint64_t seed, uint64_t lane) {
  // splitmix64 finalizer over the combined words.
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (lane + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace bift
