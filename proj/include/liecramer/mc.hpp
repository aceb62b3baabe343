#pragma once

// Monte Carlo estimates of P(sigma_n^n in B(g, r)) and the empirical rate
// curve n -> -(1/n) log p_hat, with optional exponential tilting.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "liecramer/ldp.hpp"

namespace liecramer {

/// Ball {h : distance_proxy(center, h) <= radius}. Points with no principal
/// logarithm relative to the center are non-members.
struct BallEvent {
  BallEvent(GroupElement center, double radius);

  bool contains(const GroupElement& h) const;
  bool contains(const Matrix& h) const;

  const GroupElement& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }

private:
  GroupElement center_;
  Matrix center_inv_;
  double radius_;
};

struct ProbabilityEstimate {
  std::size_t samples = 0;
  std::size_t hits = 0;
  double p_hat = 0.0;
  double lower = 0.0;
  double upper = 1.0;
  double std_error = 0.0;
  /// Kish effective sample size of the hit weights (equals hits when untilted).
  double ess = 0.0;
  bool tilted = false;
  bool degenerate = false;  // tilted with ESS < 10
};

constexpr double kWilsonZ = 1.959963984540054;
constexpr double kOneSidedZ = 1.6448536269514722;

/// Wilson 95% interval; zero hits give [0, one-sided 95% upper bound].
std::pair<double, double> wilson_interval(std::size_t hits, std::size_t samples);

/// Samples are drawn in fixed chunks keyed by (seed, n, chunk), so the
/// result does not depend on `workers`.
ProbabilityEstimate estimate_probability(const IncrementDistribution& dist, std::size_t n,
                                         const BallEvent& event, std::size_t samples,
                                         std::uint64_t seed, std::size_t workers = 1);

/// Increments drawn from w_i e^{<lambda, X_i> - Lambda(lambda)}, trajectories
/// weighted by e^{-sum <lambda, X_j> + n Lambda(lambda)}. lambda == 0 runs the
/// plain estimator.
ProbabilityEstimate tilted_estimator(const IncrementDistribution& dist, std::size_t n,
                                     const BallEvent& event, std::size_t samples,
                                     const AlgebraVector& lambda, std::uint64_t seed,
                                     std::size_t workers = 1);

enum class TiltPolicy { None, Fixed, Auto };

const char* to_string(TiltPolicy p) noexcept;
TiltPolicy parse_tilt_policy(const std::string& s);

struct TiltSpec {
  TiltPolicy policy = TiltPolicy::None;
  std::optional<AlgebraVector> lambda;  // required for Fixed
};

/// Legendre maximizer at log(center); nullopt when log(center) is not in the
/// relative interior of the domain of Lambda*.
std::optional<AlgebraVector> auto_tilt(const IncrementDistribution& dist, const BallEvent& event);

struct RateCurvePoint {
  std::size_t n = 0;
  ProbabilityEstimate estimate;
  double rate = 0.0;        // -(1/n) log p_hat, +inf when p_hat = 0
  double rate_lower = 0.0;  // from the interval's upper end
  double rate_upper = 0.0;  // from the interval's lower end
};

struct RateCurve {
  TiltPolicy policy = TiltPolicy::None;
  std::optional<AlgebraVector> tilt;
  std::vector<RateCurvePoint> points;
  std::string disclaimer;
};

RateCurve empirical_rate_curve(const IncrementDistribution& dist, const BallEvent& event,
                               const std::vector<std::size_t>& ns, std::size_t samples,
                               std::uint64_t seed, const TiltSpec& tilt, std::size_t workers = 1);

/// True if consecutive rates are non-increasing up to interval overlap.
bool non_increasing_with_overlap(const RateCurve& curve);

}  // namespace liecramer
