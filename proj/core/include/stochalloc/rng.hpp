#pragma once

#include <cstdint>
#include <random>

namespace stochalloc {

/// Portable seeded generator: std::mt19937_64 (bit-exact across standard
/// libraries) seeded through splitmix64 so that consecutive seeds give
/// unrelated streams. Variates are produced here rather than by <random>
/// distributions, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Exponential with the given rate (> 0).
  double exponential(double rate);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace stochalloc
