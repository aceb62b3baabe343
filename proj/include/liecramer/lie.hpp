#pragma once

// Matrix Lie group primitives for the stochastic group S(d,R) and its Lie
// algebra s(d,R): exponential, logarithm, bracket, adjoint operators and the
// left-invariant distance proxy |log(g^-1 h)|.

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "liecramer/error.hpp"

namespace liecramer {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace tolerance {
inline constexpr double kMembership = 1e-9;   // absolute, on linear constraints
inline constexpr double kSingularity = 1e-12; // |det| must exceed this
}  // namespace tolerance

/// Neighbourhood of the identity on which log is guaranteed to be small:
/// ||g - I||_F <= epsilon implies |log g| <= radius.
struct InjectivityRadius {
  double epsilon = 0.4;
  double radius = 0.7;
};

inline constexpr InjectivityRadius kInjectivity{};

/// Element of s(d,R): a d x d real matrix with zero row sums.
class AlgebraVector {
public:
  AlgebraVector() = default;

  /// Validates membership; throws InvalidArgument naming the violated row.
  explicit AlgebraVector(Matrix entries);

  static AlgebraVector zero(std::size_t d);
  /// Projects an arbitrary square matrix onto s(d,R) by removing row means.
  static AlgebraVector project(const Matrix& m);

  const Matrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  double norm() const { return m_.norm(); }
  double dot(const AlgebraVector& other) const;

  AlgebraVector operator+(const AlgebraVector& o) const;
  AlgebraVector operator-(const AlgebraVector& o) const;
  AlgebraVector operator-() const;
  AlgebraVector operator*(double s) const;
  friend AlgebraVector operator*(double s, const AlgebraVector& v) { return v * s; }

private:
  struct Unchecked {};
  AlgebraVector(Matrix entries, Unchecked) : m_(std::move(entries)) {}

  Matrix m_;
};

/// Element of S(d,R): invertible d x d real matrix with unit row sums.
class GroupElement {
public:
  GroupElement() = default;
  explicit GroupElement(Matrix entries);

  static GroupElement identity(std::size_t d);

  const Matrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }

  GroupElement operator*(const GroupElement& o) const;
  GroupElement inverse() const;

private:
  struct Unchecked {};
  GroupElement(Matrix entries, Unchecked) : m_(std::move(entries)) {}
  friend GroupElement exp_matrix(const AlgebraVector&);

  Matrix m_;
};

/// Linear map on the Lie algebra, represented in the orthonormal basis
/// returned by algebra_basis().
class LinearOperator {
public:
  LinearOperator() = default;
  explicit LinearOperator(Matrix rep) : rep_(std::move(rep)) {}

  static LinearOperator identity(std::size_t algebra_dim);

  const Matrix& matrix() const noexcept { return rep_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(rep_.rows()); }

  /// Operator 2-norm by power iteration on A^T A (30 iterations, tol 1e-12).
  double norm() const;

  AlgebraVector apply(const AlgebraVector& x) const;

private:
  Matrix rep_;
};

// -- generic dense matrix functions ----------------------------------------

/// Matrix exponential: scaling and squaring around a [6/6] Pade approximant.
Matrix expm(const Matrix& a);

/// Principal matrix logarithm by inverse scaling and squaring. Throws
/// OutOfDomain if a real eigenvalue is <= 0 or the square-root phase does not
/// bring the matrix within 0.25 of the identity.
Matrix logm(const Matrix& a);

/// Frechet derivatives L_exp(A, E) and L_log(A, E) via the block-triangular
/// identity f([[A, E], [0, A]]) = [[f(A), L(A, E)], [0, f(A)]].
Matrix expm_frechet(const Matrix& a, const Matrix& e);
Matrix logm_frechet(const Matrix& a, const Matrix& e);

// -- Lie primitives --------------------------------------------------------

/// Orthonormal (Frobenius) basis of s(d,R); d^2 - d elements.
std::vector<AlgebraVector> algebra_basis(std::size_t d);

/// Coordinates of x in algebra_basis(x.dim()), and the inverse map.
Vector coordinates(const AlgebraVector& x);
AlgebraVector from_coordinates(std::size_t d, const Vector& coords);

GroupElement exp_matrix(const AlgebraVector& x);
AlgebraVector log_matrix(const GroupElement& g);

/// True when g lies in the configured injectivity ball ||g - I||_F <= epsilon.
bool in_injectivity_ball(const GroupElement& g, InjectivityRadius r = kInjectivity);

AlgebraVector bracket(const AlgebraVector& x, const AlgebraVector& y);
LinearOperator ad_operator(const AlgebraVector& x);
AlgebraVector conjugate(const GroupElement& g, const AlgebraVector& x);

/// |log(g^-1 h)|; left-invariant by construction.
double distance_proxy(const GroupElement& g, const GroupElement& h);

/// Largest observed ||ad_X|| / |X| over `samples` random unit directions in
/// s(d,R) plus the basis elements.
double ad_norm_ratio(std::size_t d, std::size_t samples = 2000, unsigned long long seed = 0);

struct InjectivityReport {
  std::size_t samples = 0;
  std::size_t failures = 0;
  double max_log_norm = 0.0;      // over samples inside the epsilon ball
  double max_round_trip = 0.0;    // |exp(log g) - g|_F
};

/// Samples group elements inside the epsilon ball and checks that
/// |log g| <= radius and exp(log g) == g to 1e-10.
InjectivityReport validate_injectivity(std::size_t d, std::size_t samples,
                                       unsigned long long seed,
                                       InjectivityRadius r = kInjectivity);

}  // namespace liecramer
