#pragma once

#include <cstdint>
#include <initializer_list>

namespace fogsim {

/// Deterministic splitmix64 stream. All variates are synthesized from raw
/// 64-bit draws (no std::*_distribution), so identical seeds give identical
/// streams on every platform and compiler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be > 0.
  int uniform_int(int n) {
    return static_cast<int>((static_cast<__uint128_t>(next_u64()) *
                             static_cast<__uint128_t>(n)) >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  double normal(double mean, double sd);

  /// Exponential variate with the given rate (mean 1/rate).
  double exponential(double rate);

 private:
  std::uint64_t state_;
  double cached_unit_ = 0.0;
  bool has_cached_ = false;
};

/// Folds a list of keys into one seed. Used to derive independent
/// sub-streams (per UE, per solver individual, per tick) from a run seed.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> keys);

}  // namespace fogsim
