#pragma once

// Integral Baker-Campbell-Hausdorff formula
//   log(exp X exp tY) = X + (int_0^t g(e^{ad_X} e^{s ad_Y}) ds) Y,
//   g(z) = z log z / (z - 1) = 1 + sum_{m>=1} (-1)^{m+1} (z - 1)^m / (m (m + 1)),
// and certificates for the estimates
//   |log(exp X exp Y) - X - Y| <= C_X |Y|,
//   C_X = (e^{||ad_X||} - 1) sum_{m>=1} (sqrt2 - 1)^{m-1} / (m (m + 1)),
//   |log(exp X exp -Y)| <= C |X - Y|.

#include <cstdint>

#include "liecramer/lie.hpp"

namespace liecramer {

/// Radius (Frobenius) inside which the integral formula is used, d <= 4.
inline constexpr double kBchRadius = 0.2;

struct SeriesBudget {
  int max_order = 60;
  double tail_tolerance = 1e-14;
};

struct SeriesCertificate {
  int order = 0;             // truncation order M
  double contraction = 0.0;  // q; for the f-series this is ||ad_X||
  double tail_bound = 0.0;   // certified bound on the dropped terms
};

struct OperatorSeries {
  LinearOperator op;
  SeriesCertificate certificate;
};

/// q^(M+1) / ((M+1)(M+2)(1-q)): tail of the g-series after order M.
double g_series_tail(double q, int order);

/// f(ad_X) = (I - e^{-ad_X}) / ad_X = sum (-1)^m ad_X^m / (m+1)!.
OperatorSeries f_operator(const AlgebraVector& x, const SeriesBudget& budget = {});

/// g(e^{ad_X} e^{s ad_Y}); OutOfDomain when ||e^{ad_X} e^{s ad_Y} - I|| >= 1.
OperatorSeries g_operator(const AlgebraVector& x, const AlgebraVector& y, double s,
                          const SeriesBudget& budget = {});

/// Gauss-Legendre evaluation of the integral formula at t = 1.
AlgebraVector bch_log(const AlgebraVector& x, const AlgebraVector& y, std::size_t quad_nodes = 16,
                      const SeriesBudget& budget = {});

/// sum_{m>=1} (sqrt2 - 1)^{m-1} / (m (m + 1)), summed until the increment
/// drops below 1e-16.
double c_series_sum();

/// (e^{ad_norm} - 1) * c_series_sum().
double c_constant(double ad_norm);

struct BoundCertificate {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  bool pass = false;
};

inline constexpr double kCertificateSlack = 1e-12;

BoundCertificate make_certificate(double lhs, double rhs, double constant);

BoundCertificate verify_log_product(const AlgebraVector& x, const AlgebraVector& y);

BoundCertificate verify_lipschitz(const AlgebraVector& x, const AlgebraVector& y, double constant);

/// Largest observed |log(exp X exp -Y)| / |X - Y| over random pairs with
/// |X|, |Y| <= radius. Not the (non-constructive) optimal constant.
double empirical_lipschitz_constant(std::size_t d, double radius, std::size_t pairs,
                                    std::uint64_t seed);

struct RadiusValidation {
  std::size_t samples = 0;
  double max_contraction = 0.0;  // max ||e^{ad_X} e^{s ad_Y} - I||
  bool ok = false;               // max_contraction <= sqrt2 - 1
};

/// Boundary sample |X| = |Y| = radius, s on a 16-node grid.
RadiusValidation validate_bch_radius(std::size_t d, double radius, std::size_t samples,
                                     std::uint64_t seed);

}  // namespace liecramer
