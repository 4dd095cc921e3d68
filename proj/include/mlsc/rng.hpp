#pragma once

#include <cstdint>
#include <random>

namespace mlsc {

/// Stable 64-bit mixer (splitmix64 finalizer). Used for every seed derivation
/// in the library so that seeds are reproducible across platforms.
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent seed from a base seed and up to two stream keys.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Seeded generator with an explicit stream index. Two generators with the
/// same (seed, stream) produce the same sequence; distinct streams are keyed
/// through a seed_seq so they are statistically independent.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal(double mean, double stddev);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace mlsc
