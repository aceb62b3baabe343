#include <doctest.h>

#include <cmath>

#include "liecramer/bch.hpp"
#include "liecramer/random.hpp"
#include "oracles.hpp"

using namespace liecramer;

namespace {

std::vector<Matrix> basis_matrices(std::size_t d) {
  std::vector<Matrix> out;
  for (const auto& b : algebra_basis(d)) out.push_back(b.matrix());
  return out;
}

Matrix reference_log_product(const AlgebraVector& x, const AlgebraVector& y) {
  return oracle::mercator_log(oracle::taylor_exp(x.matrix()) * oracle::taylor_exp(y.matrix()));
}

}  // namespace

TEST_CASE("f operator") {
  const OperatorSeries z = f_operator(AlgebraVector::zero(3));
  CHECK((z.op.matrix() - Matrix::Identity(6, 6)).norm() == 0.0);

  RandomStream rng(11);
  for (std::size_t d : {2u, 3u}) {
    const auto basis = basis_matrices(d);
    for (int i = 0; i < 5; ++i) {
      const AlgebraVector x = random_algebra_element(d, 1.5, rng);
      const OperatorSeries f = f_operator(x);
      const Matrix ad = oracle::ad_matrix(x.matrix(), basis);
      // (I - e^{-ad}) ad^+ on the range; compare via f(ad) ad = I - e^{-ad}
      const Matrix lhs = f.op.matrix() * ad;
      const Matrix rhs = Matrix::Identity(ad.rows(), ad.cols()) - oracle::taylor_exp(-ad);
      CHECK((lhs - rhs).norm() < 1e-12);
      const double a = oracle::svd_norm(ad);
      CHECK(f.op.norm() <= std::expm1(a) / a + 1e-12);
      CHECK(f.certificate.tail_bound < 1e-14);
    }
  }
}

TEST_CASE("g series tail and C constant") {
  const double q = std::sqrt(2.0) - 1.0;
  const double l = -std::log1p(-q);
  const double closed = (l - (l - q) / q) / q;
  CHECK(std::abs(c_series_sum() - closed) < 1e-15);
  CHECK(c_constant(0.0) == 0.0);
  CHECK(std::abs(c_constant(0.3) - std::expm1(0.3) * closed) < 1e-15);
  CHECK_THROWS_AS(c_constant(-1.0), Error);

  double tail = 0.0;
  for (int m = 11; m < 400; ++m) tail += std::pow(0.5, m) / (m * (m + 1.0));
  CHECK(tail <= g_series_tail(0.5, 10));
}

TEST_CASE("g operator on commuting pairs") {
  RandomStream rng(5);
  const AlgebraVector x = random_algebra_element(3, 0.15, rng);
  const AlgebraVector y = 0.5 * x;
  // log(e^X e^{tY}) = X + tY, so the integral collapses to Y
  const AlgebraVector z = bch_log(x, y);
  CHECK((z - 1.5 * x).norm() < 1e-14);
  const OperatorSeries g = g_operator(x, y, 0.7);
  CHECK(g.certificate.contraction < 1.0);
  CHECK((g.op.apply(x) - x).norm() < 1e-14);
}

TEST_CASE("bch_log against log of the product") {
  RandomStream rng(7);
  for (std::size_t d : {2u, 3u, 4u}) {
    double e4 = 0.0, e16 = 0.0;
    for (int i = 0; i < 20; ++i) {
      const AlgebraVector x = random_algebra_element(d, kBchRadius, rng);
      const AlgebraVector y = random_algebra_element(d, kBchRadius, rng);
      const Matrix ref = reference_log_product(x, y);
      const double err = (bch_log(x, y).matrix() - ref).norm();
      CHECK(err < 1e-8);
      CHECK((log_matrix(exp_matrix(x) * exp_matrix(y)).matrix() - ref).norm() < 1e-12);
      e4 = std::max(e4, (bch_log(x, y, 4).matrix() - ref).norm());
      e16 = std::max(e16, err);
      // log(e^X e^Y) = -log(e^{-Y} e^{-X})
      CHECK((bch_log(x, y) + bch_log(-y, -x)).norm() < 1e-12);
    }
    CHECK(e16 <= e4 + 1e-15);
  }
  RandomStream big(8);
  const AlgebraVector far = random_algebra_direction(2, 0.5, big);
  CHECK_THROWS_AS(bch_log(far, far), Error);
}

TEST_CASE("log product and Lipschitz certificates") {
  RandomStream rng(9);
  for (std::size_t d : {2u, 3u}) {
    for (int i = 0; i < 200; ++i) {
      const AlgebraVector x = random_algebra_element(d, kBchRadius, rng);
      const AlgebraVector y = random_algebra_element(d, kBchRadius, rng);
      const BoundCertificate c = verify_log_product(x, y);
      CHECK(c.pass);
      CHECK(c.lhs <= c.rhs);
    }
    const double emp = empirical_lipschitz_constant(d, kBchRadius, 500, 3);
    CHECK(emp > 0.9);
    CHECK(emp < 2.0);
    for (int i = 0; i < 50; ++i) {
      const AlgebraVector x = random_algebra_element(d, kBchRadius, rng);
      const AlgebraVector y = random_algebra_element(d, kBchRadius, rng);
      CHECK(verify_lipschitz(x, y, 1.5 * emp).pass);
    }
  }
  const BoundCertificate bad = make_certificate(2.0, 1.0, 1.0);
  CHECK_FALSE(bad.pass);
  CHECK(make_certificate(1.0 + 1e-13, 1.0, 1.0).pass);
}

TEST_CASE("radius validation") {
  const RadiusValidation small = validate_bch_radius(2, 0.05, 50, 1);
  CHECK(small.ok);
  CHECK(small.max_contraction < std::sqrt(2.0) - 1.0);
  const RadiusValidation r = validate_bch_radius(2, kBchRadius, 50, 1);
  CHECK(r.max_contraction < 1.0);
  CHECK(r.max_contraction > small.max_contraction);
}
