#pragma once

#include <cstdint>
#include <random>

namespace bspinn::util {

/// splitmix64 step; the de-facto standard 64-bit mixer.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Stable derivation of independent stream seeds from (seed, stream).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed;
  const std::uint64_t a = splitmix64(s);
  s = a + stream;
  return splitmix64(s);
}

/// Stream ids; one stream per random role so reseeding one role never
/// shifts another.
enum Stream : std::uint64_t {
  kStreamInit = 0,
  kStreamInterior = 1,
  kStreamBoundary = 2,
  kStreamInitial = 3,
  kStreamEval = 4,
};

/// mt19937_64 with explicit output mappings, so every draw is fully
/// specified by the standard (std::uniform_real_distribution is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  /// Uniform in (lo, hi]; used for half-open time intervals.
  double uniform_open_low(double lo, double hi) {
    return hi - uniform01() * (hi - lo);
  }

  /// Uniform index in [0, n) via 128-bit multiply (bias < n / 2^64).
  std::size_t index(std::size_t n) {
    const unsigned __int128 m =
        static_cast<unsigned __int128>(engine_()) * static_cast<unsigned __int128>(n);
    return static_cast<std::size_t>(m >> 64);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bspinn::util
