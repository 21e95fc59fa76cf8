#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace funcate {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Deterministic RNG stream addressed by (seed, stream index). Simulation
// runs and bootstrap resamples each own one stream, so draws never depend
// on execution order or thread count. Distributions are implemented here
// (not via <random> distribution classes) to pin the exact draw sequence.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed;
    const std::uint64_t mixedSeed = splitmix64(s);
    s = mixedSeed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
    engine_.seed(splitmix64(s));
  }

  std::uint64_t nextU64() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double nextUniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; consumes two uniforms per draw.
  double nextNormal() {
    const double u1 = nextUniform();
    const double u2 = nextUniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  int nextBernoulli(double p) { return nextUniform() < p ? 1 : 0; }

  // Uniform integer in [0, n), n >= 1 (Lemire's multiply-shift map).
  std::uint64_t nextIndex(std::uint64_t n) {
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(engine_()) * n;
    return static_cast<std::uint64_t>(wide >> 64);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace funcate
