#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace uot {

// mt19937_64 with explicit output transforms so that streams are identical
// across standard library implementations (the std distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Exact Poisson count via cumulative exponential waiting times.
  // O(mean) draws; no underflow for large means.
  std::int64_t poisson(double mean) {
    std::int64_t count = -1;
    double acc = 0.0;
    do {
      acc += -std::log1p(-uniform());
      ++count;
    } while (acc <= mean);
    return count;
  }

  std::uint64_t next_raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

// Stateless stream split: derive independent sub-seeds from (seed, tag).
// splitmix64 finalizer on the combined word.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace uot
