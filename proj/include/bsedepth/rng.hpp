#pragma once

#include <cstdint>
#include <random>

namespace bsedepth {

/// Seeded, splittable generator. The engine is std::mt19937_64 (its output
/// sequence is fixed by the standard); value conversions are done here rather
/// than through <random> distributions, whose algorithms are
/// implementation-defined, so streams are identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal via Box-Muller (no cached second value).
  double normal();

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  /// Child stream seeded from this stream; the parent advances by one draw.
  Rng split() { return Rng(next_u64()); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace bsedepth
