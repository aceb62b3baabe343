#pragma once

// Rescaled random walk sigma_k^n = exp(X_1/n) ... exp(X_k/n) on S(d,R),
// its segment decomposition and the finite-n checks built on it.

#include <cstdint>
#include <memory>
#include <vector>

#include "liecramer/bch.hpp"
#include "liecramer/distribution.hpp"

namespace liecramer {

/// Ordered list (x_1, ..., x_m) of algebra elements.
using PathDiscretization = std::vector<AlgebraVector>;

class WalkTrajectory {
public:
  /// Walks with n above this keep only checkpoints plus the increments.
  static constexpr std::size_t kFullStorageLimit = 100000;

  std::size_t steps() const noexcept { return atom_index_.size(); }
  std::size_t dim() const noexcept { return dim_; }

  /// X_k for k in 1..n (unscaled).
  const AlgebraVector& increment(std::size_t k) const;
  std::size_t atom_index(std::size_t k) const { return atom_index_.at(k - 1); }

  /// sigma_k^n for k in 0..n; recomputed from the nearest checkpoint when
  /// only checkpoints are stored.
  GroupElement point(std::size_t k) const;
  const GroupElement& endpoint() const noexcept { return points_.back(); }

  std::size_t checkpoint_stride() const noexcept { return stride_; }
  bool stores_all_points() const noexcept { return stride_ == 1; }

private:
  friend WalkTrajectory simulate_walk(const IncrementDistribution&, std::size_t, std::uint64_t,
                                      std::size_t);
  std::size_t dim_ = 0;
  std::vector<AlgebraVector> atoms_;
  std::vector<Matrix> steps_;           // exp(X_i / n) per atom
  std::vector<std::size_t> atom_index_;
  std::size_t stride_ = 1;
  std::vector<GroupElement> points_;    // sigma_{j*stride}, plus sigma_n last
};

/// Draws X_1..X_n i.i.d. from `dist` using RandomStream(seed) and forms the
/// partial products. checkpoint_stride = 0 chooses full storage for
/// n <= 1e5 and otherwise a stride of floor(n / 1000).
WalkTrajectory simulate_walk(const IncrementDistribution& dist, std::size_t n, std::uint64_t seed,
                             std::size_t checkpoint_stride = 0);

struct SegmentDecomposition {
  std::size_t m = 0;
  std::vector<std::size_t> boundaries;               // n_0 .. n_m
  std::vector<std::vector<AlgebraVector>> logs;      // logs[l-1][k-1] = Y_k^{n,m,l}

  /// Y_{n_l - n_{l-1}}^{n,m,l}: log of the whole l-th segment.
  PathDiscretization segment_logs() const;
};

/// Errors with OutOfDomain (asking for a larger m) when a segment
/// displacement has no principal logarithm.
SegmentDecomposition segment_decomposition(const WalkTrajectory& traj, std::size_t m);

struct ReplacementCertificate {
  double max_deviation = 0.0;  // max_k |log sigma_k^n - (1/n) sum_{i<=k} X_i|, k <= floor(n/m)
  double bound = 0.0;          // c_constant(kappa B / m) * B / m
  double kappa = 0.0;
  double support_bound = 0.0;
  bool pass = false;

  /// Associative merge for parallel reduction over seeds.
  ReplacementCertificate merge(const ReplacementCertificate& other) const;
};

/// kappa_d: sup of ||ad_X|| / |X|, measured once per dimension by a sweep of
/// random directions and the basis, and cached.
double ad_ratio_for_dimension(std::size_t d);

/// kappa used for a distribution: the larger of kappa_d and the ratio
/// attained on the support.
double kappa_for(const IncrementDistribution& dist);

ReplacementCertificate replacement_deviation(const WalkTrajectory& traj, std::size_t m,
                                             double kappa, double support_bound);
ReplacementCertificate replacement_deviation(const WalkTrajectory& traj,
                                             const IncrementDistribution& dist, std::size_t m);

GroupElement psi_m(const PathDiscretization& segments);

/// distance_proxy(Psi_m(x), Psi_m(y)) against constant * sum |x_i - y_i|.
/// Requires |x_i|, |y_i| <= r / m.
BoundCertificate psi_m_continuity_check(const PathDiscretization& x, const PathDiscretization& y,
                                        double r, double constant);

/// Largest observed distance_proxy(Psi_m(x), Psi_m(y)) / sum |x_i - y_i| over
/// random pairs with |x_i|, |y_i| <= r / m.
double empirical_continuity_constant(std::size_t d, double r, std::size_t m, std::size_t pairs,
                                     std::uint64_t seed);

}  // namespace liecramer
