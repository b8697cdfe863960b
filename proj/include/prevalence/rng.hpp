#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "prevalence/errors.hpp"

namespace prevalence {

// splitmix64: cheap, well-mixed stream derivation for per-chain / per-worker seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base + 0x9E3779B97F4A7C15ULL * (stream + 1));
}

// Deterministic RNG wrapper. mt19937_64 output is fully pinned by the standard;
// the distributions below are hand-rolled because std:: distributions are
// implementation-defined and would break bit-reproducibility across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_double() { return (gen_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_double() < p; }

  // Unbiased uniform integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw ValidationError("Rng::below: n must be positive");
    const std::uint64_t reject = (0 - n) % n;  // 2^64 mod n
    std::uint64_t x;
    do {
      x = gen_();
    } while (x < reject);
    return x % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace prevalence
