#pragma once

#include <cmath>
#include <cstdint>

#include "spde/util.hpp"

namespace spde {

// SplitMix64 finalizer (Steele/Lea/Flood; Vigna's fixed-increment variant).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based generator: the i-th variate of stream (seed, stream) is a pure
// function of (seed, stream, i). Random access makes replicate loops
// parallelizable with bit-reproducible output.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix64(mix64(seed) ^ (0xD2B74407B1CE6E93ULL * (stream + 1)))) {}

  std::uint64_t bits(std::uint64_t i) const { return mix64(key_ + 0xA0761D6478BD642FULL * (i + 1)); }

  // uniform on (0, 1]; never returns 0 so log() below is safe
  double uniform(std::uint64_t i) const {
    return (static_cast<double>(bits(i) >> 11) + 1.0) * 0x1.0p-53;
  }

  // i-th standard normal via Box-Muller; consumption is fixed at two uniforms
  // per pair, so indexing stays counter-addressable.
  double gaussian(std::uint64_t i) const {
    const std::uint64_t p = i / 2;
    const double u1 = uniform(2 * p);
    const double u2 = uniform(2 * p + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = kTwoPi * u2;
    return (i % 2 == 0) ? r * std::cos(a) : r * std::sin(a);
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

inline const char* rng_name() { return "splitmix64-counter"; }

}  // namespace spde
