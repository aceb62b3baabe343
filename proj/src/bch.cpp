#include "liecramer/bch.hpp"

#include <cmath>
#include <sstream>

#include "liecramer/quadrature.hpp"
#include "liecramer/random.hpp"

namespace liecramer {

namespace {

void check_radius(const AlgebraVector& v, const char* what) {
  if (v.norm() > kBchRadius + 1e-12) {
    std::ostringstream os;
    os << what << ": |X| = " << v.norm() << " exceeds the BCH radius " << kBchRadius;
    fail(ErrorKind::OutOfDomain, os.str());
  }
}

Matrix adjoint_exponential_product(const AlgebraVector& x, const AlgebraVector& y, double s) {
  return expm(ad_operator(x).matrix()) * expm(s * ad_operator(y).matrix());
}

}  // namespace

double g_series_tail(double q, int order) {
  const double m = static_cast<double>(order);
  return std::pow(q, m + 1.0) / ((m + 1.0) * (m + 2.0) * (1.0 - q));
}

OperatorSeries f_operator(const AlgebraVector& x, const SeriesBudget& budget) {
  const Matrix ad = ad_operator(x).matrix();
  const auto n = ad.rows();
  const double a = LinearOperator(ad).norm();
  Matrix acc = Matrix::Identity(n, n);
  Matrix power = Matrix::Identity(n, n);
  double coeff = 1.0;  // 1/(m+1)!
  OperatorSeries out;
  out.certificate.contraction = a;
  for (int m = 1; m <= budget.max_order; ++m) {
    power = power * ad;
    coeff /= static_cast<double>(m + 1);
    acc += ((m % 2 == 0) ? coeff : -coeff) * power;
    // sum_{j>m} a^j/(j+1)! <= a^{m+1}/(m+2)! e^a
    const double tail = std::pow(a, m + 1) * coeff / static_cast<double>(m + 2) * std::exp(a);
    out.certificate.order = m;
    out.certificate.tail_bound = tail;
    if (tail < budget.tail_tolerance) break;
  }
  out.op = LinearOperator(std::move(acc));
  return out;
}

OperatorSeries g_operator(const AlgebraVector& x, const AlgebraVector& y, double s,
                          const SeriesBudget& budget) {
  if (x.dim() != y.dim()) fail(ErrorKind::InvalidArgument, "g_operator: dimension mismatch");
  const Matrix t = adjoint_exponential_product(x, y, s);
  const auto n = t.rows();
  const Matrix e = t - Matrix::Identity(n, n);
  const double q = LinearOperator(e).norm();
  if (!(q < 1.0)) {
    std::ostringstream os;
    os << "g_operator: contraction violated, ||e^{ad_X} e^{s ad_Y} - I|| = " << q;
    fail(ErrorKind::OutOfDomain, os.str());
  }
  Matrix acc = Matrix::Identity(n, n);
  Matrix power = Matrix::Identity(n, n);
  OperatorSeries out;
  out.certificate.contraction = q;
  for (int m = 1; m <= budget.max_order; ++m) {
    power = power * e;
    const double c = ((m % 2 == 1) ? 1.0 : -1.0) / (static_cast<double>(m) * (m + 1.0));
    acc += c * power;
    out.certificate.order = m;
    out.certificate.tail_bound = g_series_tail(q, m);
    if (out.certificate.tail_bound < budget.tail_tolerance) break;
  }
  out.op = LinearOperator(std::move(acc));
  return out;
}

AlgebraVector bch_log(const AlgebraVector& x, const AlgebraVector& y, std::size_t quad_nodes,
                      const SeriesBudget& budget) {
  if (x.dim() != y.dim()) fail(ErrorKind::InvalidArgument, "bch_log: dimension mismatch");
  check_radius(x, "bch_log");
  check_radius(y, "bch_log");
  const QuadratureRule rule = gauss_legendre(quad_nodes);
  const auto dim = static_cast<Eigen::Index>(x.dim() * x.dim() - x.dim());
  Matrix integral = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    integral += rule.weights[i] * g_operator(x, y, rule.nodes[i], budget).op.matrix();
  }
  return x + LinearOperator(std::move(integral)).apply(y);
}

double c_series_sum() {
  static const double sum = [] {
    const double r = std::sqrt(2.0) - 1.0;
    double acc = 0.0;
    double power = 1.0;  // r^{m-1}
    for (int m = 1; m < 10000; ++m) {
      const double inc = power / (static_cast<double>(m) * (m + 1.0));
      acc += inc;
      if (inc < 1e-16) break;
      power *= r;
    }
    return acc;
  }();
  return sum;
}

double c_constant(double ad_norm) {
  if (!(ad_norm >= 0.0)) fail(ErrorKind::InvalidArgument, "c_constant: ad_norm must be >= 0");
  return std::expm1(ad_norm) * c_series_sum();
}

BoundCertificate make_certificate(double lhs, double rhs, double constant) {
  return BoundCertificate{lhs, rhs, constant, lhs <= rhs + kCertificateSlack};
}

BoundCertificate verify_log_product(const AlgebraVector& x, const AlgebraVector& y) {
  if (x.dim() != y.dim()) fail(ErrorKind::InvalidArgument, "verify_log_product: dimension mismatch");
  check_radius(x, "verify_log_product");
  check_radius(y, "verify_log_product");
  const AlgebraVector z = log_matrix(exp_matrix(x) * exp_matrix(y));
  const double lhs = (z - x - y).norm();
  const double c = c_constant(ad_operator(x).norm());
  return make_certificate(lhs, c * y.norm(), c);
}

BoundCertificate verify_lipschitz(const AlgebraVector& x, const AlgebraVector& y, double constant) {
  if (x.dim() != y.dim()) fail(ErrorKind::InvalidArgument, "verify_lipschitz: dimension mismatch");
  check_radius(x, "verify_lipschitz");
  check_radius(y, "verify_lipschitz");
  const double lhs = log_matrix(exp_matrix(x) * exp_matrix(-y)).norm();
  return make_certificate(lhs, constant * (x - y).norm(), constant);
}

double empirical_lipschitz_constant(std::size_t d, double radius, std::size_t pairs,
                                    std::uint64_t seed) {
  RandomStream rng(seed, 0x6c69707363ULL);
  double best = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const AlgebraVector x = random_algebra_element(d, radius, rng);
    const AlgebraVector y = random_algebra_element(d, radius, rng);
    const double diff = (x - y).norm();
    if (diff == 0.0) continue;
    best = std::max(best, log_matrix(exp_matrix(x) * exp_matrix(-y)).norm() / diff);
  }
  return best;
}

RadiusValidation validate_bch_radius(std::size_t d, double radius, std::size_t samples,
                                     std::uint64_t seed) {
  RandomStream rng(seed, 0x72626368ULL);
  const QuadratureRule grid = gauss_legendre(16);
  RadiusValidation v;
  v.samples = samples;
  for (std::size_t i = 0; i < samples; ++i) {
    const AlgebraVector x = random_algebra_direction(d, radius, rng);
    const AlgebraVector y = random_algebra_direction(d, radius, rng);
    for (double s : grid.nodes) {
      const Matrix t = adjoint_exponential_product(x, y, s);
      const double q = LinearOperator(t - Matrix::Identity(t.rows(), t.cols())).norm();
      v.max_contraction = std::max(v.max_contraction, q);
    }
  }
  v.ok = v.max_contraction <= std::sqrt(2.0) - 1.0;
  return v;
}

}  // namespace liecramer
