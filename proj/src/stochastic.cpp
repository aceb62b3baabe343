#include "liecramer/stochastic.hpp"

#include <cmath>
#include <sstream>

#include "liecramer/distribution.hpp"

namespace liecramer {

MembershipReport is_group_member(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    fail(ErrorKind::InvalidArgument, "is_group_member: matrix must be square");
  }
  MembershipReport r;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    r.row_sum_residual = std::max(r.row_sum_residual, std::abs(m.row(i).sum() - 1.0));
  }
  r.determinant = m.determinant();
  if (!(r.row_sum_residual <= tol)) {
    std::ostringstream os;
    os << "unit row sums (residual " << r.row_sum_residual << ")";
    r.violated = os.str();
  } else if (!(std::abs(r.determinant) > tolerance::kSingularity)) {
    std::ostringstream os;
    os << "invertibility (|det| = " << std::abs(r.determinant) << ")";
    r.violated = os.str();
  }
  r.member = r.violated.empty();
  return r;
}

bool is_positive_cone(const AlgebraVector& a) {
  const Matrix& m = a.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (std::abs(m.row(i).sum()) > tolerance::kMembership) {
      fail(ErrorKind::InvalidArgument, "is_positive_cone: not an element of s(d,R)");
    }
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i != j && m(i, j) < -kConeTolerance) return false;
    }
  }
  return true;
}

ConeCertificate exp_cone_certificate(const AlgebraVector& a) {
  if (!is_positive_cone(a)) {
    fail(ErrorKind::InvalidArgument, "exp_cone_certificate: matrix has a negative off-diagonal entry");
  }
  const Matrix& m = a.matrix();
  const auto n = m.rows();
  ConeCertificate c;
  c.shift = m.diagonal().cwiseAbs().maxCoeff();
  const Matrix shifted = m + c.shift * Matrix::Identity(n, n);
  c.shifted_exp = expm(shifted);
  const Matrix direct = expm(m);
  c.identity_error = (direct - std::exp(-c.shift) * c.shifted_exp).norm();
  // A + kI >= 0 entrywise, so its exponential series has only non-negative
  // terms; allow round-off on exact zeros.
  c.verified = c.identity_error <= 1e-10 * std::max(1.0, direct.norm()) &&
               c.shifted_exp.minCoeff() >= -1e-12;
  return c;
}

namespace {

double positive_parameter(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    fail(ErrorKind::InvalidArgument,
         std::string("example_model: ") + name + " must be positive and finite");
  }
  return v;
}

}  // namespace

ExampleModel::ExampleModel(double alpha, double beta)
    : alpha_(positive_parameter(alpha, "alpha")),
      beta_(positive_parameter(beta, "beta")),
      a_(coordinates_to_algebra(alpha_, 0.0)),
      b_(coordinates_to_algebra(0.0, beta_)) {
  // The closed forms are the reference; the generic exponential must agree.
  const double err = (expm(a_.matrix()) - exp_a(alpha_, 1.0)).norm() +
                     (expm(b_.matrix()) - exp_b(beta_, 1.0)).norm();
  if (err > 1e-10 * (1.0 + alpha_ + beta_)) {
    fail(ErrorKind::Numeric, "example_model: closed-form exponentials disagree with expm");
  }
}

Matrix ExampleModel::exp_a(double alpha, double t) {
  Matrix m(2, 2);
  const double e = std::exp(-alpha * t);
  m << e, -std::expm1(-alpha * t), 0.0, 1.0;
  return m;
}

Matrix ExampleModel::exp_b(double beta, double t) {
  Matrix m(2, 2);
  const double e = std::exp(-beta * t);
  m << 1.0, 0.0, -std::expm1(-beta * t), e;
  return m;
}

GroupElement ExampleModel::step_a(double n) const { return GroupElement(exp_a(alpha_, 1.0 / n)); }

GroupElement ExampleModel::step_b(double n) const { return GroupElement(exp_b(beta_, 1.0 / n)); }

AlgebraVector ExampleModel::mean() const { return 0.5 * (a_ + b_); }

IncrementDistribution ExampleModel::distribution() const {
  return IncrementDistribution({{0.5, a_}, {0.5, b_}});
}

AlgebraVector ExampleModel::coordinates_to_algebra(double x1, double x2) {
  Matrix m(2, 2);
  m << -x1, x1, x2, -x2;
  return AlgebraVector(std::move(m));
}

ExampleModel example_model(double alpha, double beta) { return ExampleModel(alpha, beta); }

}  // namespace liecramer
