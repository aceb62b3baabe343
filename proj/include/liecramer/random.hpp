#pragma once

#include <cstdint>
#include <random>

#include "liecramer/lie.hpp"

namespace liecramer {

/// Seedable, splittable random source.
///
/// A stream is identified by (seed, stream id). Stream ids are how parallel
/// work is sharded: chain k of a run seeded with s draws from stream (s, k),
/// so results never depend on the number of workers. The engine is
/// std::mt19937_64 initialised from std::seed_seq over the four 32-bit halves
/// of (seed, stream).
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

  /// Uniform in [0, 1).
  double uniform() { return uniform_(engine_); }
  double normal() { return normal_(engine_); }

  std::mt19937_64& engine() noexcept { return engine_; }

private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Uniform direction in s(d,R) scaled to a norm drawn uniformly from the
/// ball of the given radius (radius * U^(1/D), D = d^2 - d).
AlgebraVector random_algebra_element(std::size_t d, double radius, RandomStream& rng);

/// Uniform direction with exactly the given norm.
AlgebraVector random_algebra_direction(std::size_t d, double norm, RandomStream& rng);

/// Random element of the positive cone: off-diagonals uniform in [0, 1),
/// diagonal fixed by zero row sums, then scaled to the given Frobenius norm.
AlgebraVector random_cone_element(std::size_t d, double norm, RandomStream& rng);

}  // namespace liecramer
