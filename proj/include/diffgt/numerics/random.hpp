#pragma once

#include <cstddef>
#include <cstdint>

#include "diffgt/numerics/matrix.hpp"

namespace diffgt {

/// Counter-based generator: the n-th 64-bit output is a SplitMix64 finaliser
/// applied to seed + n·γ. Normal draws use Box–Muller on consecutive uniforms.
/// Single owner; copy it to fork an identical stream.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t position() const { return counter_; }

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  double normal();

  /// Independent stream keyed by `tag`; does not advance this stream.
  RandomSource derive(std::uint64_t tag) const;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// rows×cols matrix of i.i.d. N(0, 1) draws.
Matrix standard_normal(RandomSource& rng, std::size_t rows, std::size_t cols);

std::uint64_t mix64(std::uint64_t x);

}  // namespace diffgt
