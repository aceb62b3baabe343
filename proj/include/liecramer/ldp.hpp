#pragma once

// Log moment generating function Lambda(lambda) = log E exp<lambda, X> and its
// Legendre transform Lambda*(x) = sup_lambda <lambda, x> - Lambda(lambda) for
// finitely supported laws on s(d,R).
//
// The effective domain of Lambda* is the convex hull of the support. Inside
// its relative interior the supremum is attained and found by damped Newton
// in coordinates of the support's affine hull. On the relative boundary the
// supremum is a limit; it is evaluated on the minimal face F containing x as
//   Lambda*(x) = -log P(X in F) + Lambda*_F(x)
// where Lambda_F belongs to the law conditioned on F.

#include <optional>

#include "liecramer/distribution.hpp"

namespace liecramer {

enum class DomainClass { Inside, Boundary, Outside };

const char* to_string(DomainClass c) noexcept;

struct LegendreResult {
  double value = 0.0;  // +infinity when !finite
  bool finite = false;
  DomainClass domain = DomainClass::Outside;
  /// Maximizing lambda, present only when the supremum is attained (Inside).
  /// Chosen in the span of the support's directions (minimum norm).
  std::optional<AlgebraVector> maximizer;
  double gradient_norm = 0.0;
  int iterations = 0;
};

double log_mgf(const IncrementDistribution& dist, const AlgebraVector& lambda);

/// Gradient of Lambda at lambda: the mean of the tilted law.
AlgebraVector log_mgf_gradient(const IncrementDistribution& dist, const AlgebraVector& lambda);

/// Precomputes the affine hull of the support so that repeated evaluations
/// (rate minimisation, quadrature) avoid redoing the decomposition.
class LegendreSolver {
public:
  explicit LegendreSolver(const IncrementDistribution& dist);

  LegendreResult operator()(const AlgebraVector& x) const;
  DomainClass classify(const AlgebraVector& x) const;

  std::size_t dim() const noexcept { return d_; }
  /// Dimension of the support's affine hull.
  std::size_t hull_dim() const noexcept { return static_cast<std::size_t>(directions_.cols()); }
  /// Orthonormal basis (in algebra coordinates) of the hull's direction space.
  const Matrix& hull_directions() const noexcept { return directions_; }
  const Vector& mean_coordinates() const noexcept { return mean_; }

  static constexpr double kGradientTol = 1e-11;
  static constexpr double kDomainTol = 1e-9;
  static constexpr double kDivergenceNorm = 1e6;

private:
  std::size_t d_;
  Vector weights_;
  Matrix points_;      // algebra coordinates, one column per atom
  Vector mean_;
  Matrix directions_;
};

LegendreResult legendre(const IncrementDistribution& dist, const AlgebraVector& x);

DomainClass domain_check(const IncrementDistribution& dist, const AlgebraVector& x);

/// Lambda* of the two-atom example at [[-x1, x1], [x2, -x2]]; +infinity
/// (std::numeric_limits<double>::infinity()) off the segment
/// beta x1 + alpha x2 = alpha beta, x1 in [0, alpha], x2 in [0, beta].
double legendre_closed_form_s2(double x1, double x2, double alpha, double beta);

}  // namespace liecramer
