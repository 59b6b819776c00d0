#pragma once

#include <array>
#include <cstdint>

namespace af {

/// xoshiro256++ with splitmix64 seeding. Used everywhere instead of <random>
/// distributions so streams are reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();
  /// Uniform double in [0,1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). n must be positive.
  int uniform_int(int n);
  bool bernoulli(double p) { return uniform() < p; }
  /// Standard normal via Box-Muller (pairs cached).
  double normal();
  float normalf() { return static_cast<float>(normal()); }

  /// Independent deterministic substream; depends only on the construction
  /// seed and `stream`, not on how much this generator has been consumed.
  Rng fork(uint64_t stream) const;

  uint64_t seed() const { return seed_; }

  static uint64_t mix(uint64_t a, uint64_t b);

 private:
  uint64_t seed_ = 0;
  std::array<uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace af
