#pragma once

#include <cstddef>
#include <cstdint>

namespace bcgp {

/// Portable pseudo-random generator: xoshiro256** seeded through splitmix64.
///
/// Every draw (uniforms, normals, indices) is defined here rather than through
/// <random> distributions, whose output differs between standard libraries.
/// Splits, samples and MCMC chains therefore reproduce bit-for-bit on any
/// platform given the same seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1); never returns 0.
  double uniform_open();
  /// Standard normal via the Box-Muller transform (second value cached).
  double normal();
  /// Uniform integer on [0, n) without modulo bias. Requires n > 0.
  std::size_t index(std::size_t n);

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace bcgp
