#pragma once

// The stochastic group S(d,R) = {P : det P != 0, P 1 = 1}, its algebra
// s(d,R) = {A : A 1 = 0}, the positive cone of rate matrices and the
// two-atom 2x2 example model.

#include <string>

#include "liecramer/lie.hpp"

namespace liecramer {

class IncrementDistribution;

struct MembershipReport {
  bool member = false;
  double row_sum_residual = 0.0;  // max_i |sum_j M_ij - 1|
  double determinant = 0.0;
  std::string violated;           // empty when member
};

MembershipReport is_group_member(const Matrix& m, double tol = tolerance::kMembership);

inline constexpr double kConeTolerance = 1e-12;

/// Off-diagonal entries >= -1e-12.
bool is_positive_cone(const AlgebraVector& a);

struct ConeCertificate {
  double shift = 0.0;     // k = max_i |A_ii|
  Matrix shifted_exp;     // exp(A + kI), entrywise >= 0
  double identity_error = 0.0;  // |exp(A) - e^-k exp(A + kI)|_F
  bool verified = false;
};

/// exp(A) = e^-k exp(A + kI) with A + kI entrywise non-negative, so exp(A) is
/// a transition matrix. Throws InvalidArgument when A is not in the cone.
ConeCertificate exp_cone_certificate(const AlgebraVector& a);

/// Two-atom model X = A or B with probability 1/2 each,
/// A = [[-alpha, alpha], [0, 0]], B = [[0, 0], [beta, -beta]].
class ExampleModel {
public:
  ExampleModel(double alpha, double beta);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  const AlgebraVector& a() const noexcept { return a_; }
  const AlgebraVector& b() const noexcept { return b_; }

  /// Closed-form exp(A/n) and exp(B/n).
  GroupElement step_a(double n) const;
  GroupElement step_b(double n) const;

  /// exp(t X) along the closed forms (t = 1/n).
  static Matrix exp_a(double alpha, double t);
  static Matrix exp_b(double beta, double t);

  AlgebraVector mean() const;
  IncrementDistribution distribution() const;

  /// Element [[-x1, x1], [x2, -x2]] of s(2,R).
  static AlgebraVector coordinates_to_algebra(double x1, double x2);

private:
  double alpha_;
  double beta_;
  AlgebraVector a_;
  AlgebraVector b_;
};

ExampleModel example_model(double alpha, double beta);

}  // namespace liecramer
