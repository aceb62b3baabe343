#pragma once

#include <cstddef>
#include <vector>

#include "liecramer/lie.hpp"

namespace liecramer {

class RandomStream;

struct Atom {
  double weight = 0.0;
  AlgebraVector vector;
};

/// Finitely supported probability measure on s(d,R).
class IncrementDistribution {
public:
  /// Weights must be positive and sum to 1 within 1e-12; all atoms must share
  /// one dimension.
  explicit IncrementDistribution(std::vector<Atom> atoms);

  static IncrementDistribution point_mass(const AlgebraVector& x);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  std::size_t dim() const noexcept { return atoms_.front().vector.dim(); }

  /// B = max_i |X_i|.
  double support_bound() const noexcept { return support_bound_; }
  AlgebraVector mean() const;

  /// Index of the atom selected by a uniform draw u in [0, 1), using the
  /// given (possibly tilted) cumulative weights.
  static std::size_t pick(const std::vector<double>& cumulative, double u);
  std::vector<double> cumulative_weights() const;

private:
  std::vector<Atom> atoms_;
  double support_bound_ = 0.0;
};

}  // namespace liecramer
