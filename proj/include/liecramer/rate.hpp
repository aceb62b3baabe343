#pragma once

// Path-space rate function
//   I(g) = inf { int_0^1 Lambda*(gamma(t)^-1 gamma'(t)) dt : gamma(0) = e, gamma(1) = g }
// evaluated three ways: quadrature along an explicit path, minimisation over
// piecewise one-parameter paths Psi_m(x_1..x_m) = exp(x_1)...exp(x_m), and
// the closed form printed for the alpha = beta two-atom model.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "liecramer/ldp.hpp"
#include "liecramer/walk.hpp"

namespace liecramer {

/// A path gamma: [0, 1] -> S(d,R) with gamma(0) = e.
class PathSpec {
public:
  struct ClosedFormS2 {
    double alpha = 0.0;
    double m12 = 0.0;
    double m21 = 0.0;
  };

  using Evaluator = std::function<Matrix(double)>;

  /// gamma_1(t) = M12 psi(t) / (1 - e^-alpha), gamma_2(t) = M21 psi(t) / (1 - e^-alpha),
  /// psi(t) = 1 - e^{-alpha t}; analytic logarithmic derivative.
  static PathSpec optimal_s2(double alpha, double m12, double m21);

  /// gamma(t) = exp(t X); analytic logarithmic derivative X.
  static PathSpec one_parameter(const AlgebraVector& x);

  /// Samples (t_j, gamma(t_j)) with t strictly increasing from 0 to 1 and
  /// gamma(0) = e; interpolated by one-parameter pieces. Throws OutOfDomain
  /// when consecutive samples are too far apart for a logarithm.
  static PathSpec sampled(std::vector<double> times, std::vector<GroupElement> points);

  /// Arbitrary smooth path; derivatives by central differences.
  static PathSpec from_function(std::size_t d, Evaluator gamma);

  std::size_t dim() const noexcept { return dim_; }
  GroupElement at(double t) const;
  std::optional<AlgebraVector> analytic_log_derivative(double t) const;
  const std::optional<ClosedFormS2>& closed_form() const noexcept { return closed_form_; }

private:
  std::size_t dim_ = 0;
  Evaluator eval_;
  std::function<AlgebraVector(double)> log_derivative_;
  std::optional<ClosedFormS2> closed_form_;
};

/// gamma(t)^-1 gamma'(t). Analytic when the path provides it, otherwise
/// gamma(t)^-1 (gamma(t+h) - gamma(t-h)) / 2h projected onto s(d,R).
AlgebraVector logarithmic_derivative(const PathSpec& path, double t, double h = 1e-5);

/// Central difference gamma(t)^-1 (gamma(t+h) - gamma(t-h)) / 2h, projected.
AlgebraVector finite_difference_log_derivative(const PathSpec& path, double t, double h);

struct PathQuadrature {
  std::size_t subintervals = 32;
  std::size_t nodes = 8;
};

/// Composite Gauss-Legendre value of int_0^1 Lambda*(gamma^-1 gamma') dt;
/// +infinity if any node falls outside the domain of Lambda*.
double rate_along_path(const IncrementDistribution& dist, const PathSpec& path,
                       const PathQuadrature& quad = {});

struct DiscretizedRateOptions {
  std::vector<double> penalties{10.0, 1e2, 1e3, 1e4};
  std::size_t max_outer = 40;        // total multiplier updates incl. escalation
  std::size_t max_inner = 400;       // quasi-Newton iterations per outer step
  double gradient_tol = 1e-10;
  double residual_tol = 1e-10;       // |log(Psi_m(x)^-1 g)| accepted as feasible
  double infeasible_residual = 1e-6; // above this the report is +infinity
  std::optional<PathDiscretization> seed;
};

struct DiscretizedRate {
  std::size_t m = 0;
  double value = 0.0;  // (1/m) sum Lambda*(m x_i); +infinity if infeasible
  bool finite = false;
  double constraint_residual = 0.0;
  PathDiscretization minimizer;
  std::size_t outer_iterations = 0;
  std::size_t inner_iterations = 0;
  double final_penalty = 0.0;
  std::string diagnostics;
};

/// Minimises (1/m) sum Lambda*(m x_i) subject to Psi_m(x) = g by augmented
/// Lagrangian iterations on rho |log(Psi_m(x)^-1 g)|^2 with rho escalation.
/// Segments are parametrised inside the affine hull of the support (Lambda*
/// is +infinity elsewhere); inner solves use BFGS with an infinity-aware
/// backtracking line search and the envelope gradient dLambda*/dx = lambda*.
DiscretizedRate discretized_rate(const IncrementDistribution& dist, const GroupElement& g,
                                 std::size_t m, const DiscretizedRateOptions& opts = {});

/// Requires alpha > 0 and M12 + M21 = 1 - e^-alpha within 1e-9 (Infeasible
/// error otherwise).
PathSpec optimal_path_s2(double alpha, const GroupElement& m);

/// The expression
///   a^2 M12 log(a M12 / (1 - e^-a)) + a^2 M21 log(a M21 / (1 - e^-a))
///     + (1 - a) e^-a - log(a^2 / 2) - 1
/// on M12 + M21 = 1 - e^-a (0 log 0 = 0), +infinity elsewhere.
double closed_form_rate_s2(const GroupElement& m, double alpha);

struct RateReport {
  std::vector<DiscretizedRate> discretized;
  std::optional<double> quadrature;    // rate_along_path on the supplied path
  std::optional<double> closed_form;   // closed_form_rate_s2 when applicable
  std::vector<std::string> findings;
};

RateReport rate_report(const IncrementDistribution& dist, const GroupElement& g,
                       const std::vector<std::size_t>& ms, const std::optional<PathSpec>& path,
                       std::optional<double> closed_form_alpha,
                       const DiscretizedRateOptions& opts = {});

struct JensenCheck {
  double discrete = 0.0;  // (1/m) sum Lambda*(m ytilde_i)
  double integral = 0.0;  // quadrature of int Lambda*(gamma^-1 gamma')
};

/// ytilde_i = int over [(i-1)/m, i/m] of the logarithmic derivative.
JensenCheck jensen_check(const IncrementDistribution& dist, const PathSpec& path, std::size_t m,
                         const PathQuadrature& quad = {});

/// max_i |log(gamma((i-1)/m)^-1 gamma(i/m)) - int_{(i-1)/m}^{i/m} gamma^-1 gamma' dt|.
double segment_integral_gap(const PathSpec& path, std::size_t m, std::size_t nodes_per_segment = 16);

}  // namespace liecramer
