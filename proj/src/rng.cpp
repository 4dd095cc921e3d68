#include "mlsc/rng.hpp"

#include <array>

namespace mlsc {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(seed ^ mix64(a)) ^ mix64(b + 0x632be59bd9b4e019ULL));
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  const std::uint64_t k1 = mix64(seed);
  const std::uint64_t k2 = mix64(stream ^ 0xd1b54a32d192ed03ULL);
  std::array<std::uint32_t, 4> words{
      static_cast<std::uint32_t>(k1), static_cast<std::uint32_t>(k1 >> 32),
      static_cast<std::uint32_t>(k2), static_cast<std::uint32_t>(k2 >> 32)};
  std::seed_seq seq(words.begin(), words.end());
  engine_.seed(seq);
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection of the partial top bucket keeps the draw unbiased.
  const std::uint64_t limit = max() - max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::normal(double mean, double stddev) {
  return mean + stddev * normal_(engine_);
}

}  // namespace mlsc
