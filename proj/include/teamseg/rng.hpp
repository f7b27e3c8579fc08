#pragma once

#include <cstdint>
#include <random>

namespace teamseg {

/// 64-bit Mersenne Twister with portable conversions. The standard
/// distributions are implementation-defined, so everything seeded in this
/// library draws through these helpers to stay reproducible across
/// toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }

  /// Uniform integer in [0, n) by rejection (unbiased).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = n ? (~std::uint64_t{0} / n) * n : 0;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent stream seed from a base seed and a stream index.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace teamseg
