#include <doctest.h>

#include <cmath>

#include "liecramer/distribution.hpp"
#include "liecramer/random.hpp"
#include "liecramer/stochastic.hpp"
#include "oracles.hpp"

using namespace liecramer;

TEST_CASE("is_group_member") {
  Matrix p(2, 2);
  p << 0.7, 0.3, 0.4, 0.6;
  CHECK(is_group_member(p).member);

  Matrix rows(2, 2);
  rows << 0.7, 0.4, 0.4, 0.6;
  const auto r = is_group_member(rows);
  CHECK_FALSE(r.member);
  CHECK(std::abs(r.row_sum_residual - 0.1) < 1e-15);
  CHECK_FALSE(r.violated.empty());

  Matrix sing(2, 2);
  sing << 0.5, 0.5, 0.5, 0.5;
  const auto s = is_group_member(sing);
  CHECK_FALSE(s.member);
  CHECK(std::abs(s.determinant) < 1e-15);

  // non-stochastic entries are allowed in the group
  Matrix neg(2, 2);
  neg << 1.5, -0.5, 0.2, 0.8;
  CHECK(is_group_member(neg).member);

  CHECK(is_group_member(rows, 0.2).member);
}

TEST_CASE("positive cone") {
  Matrix a(3, 3);
  a << -1, 0.5, 0.5, 0, 0, 0, 2, 1, -3;
  CHECK(is_positive_cone(AlgebraVector(a)));
  Matrix b(2, 2);
  b << 1, -1, 0, 0;
  CHECK_FALSE(is_positive_cone(AlgebraVector(b)));
  Matrix c(2, 2);
  c << -1, 1, -1e-13, 1e-13;
  CHECK(is_positive_cone(AlgebraVector(c)));
}

TEST_CASE("exp_cone_certificate") {
  RandomStream rng(2);
  for (int i = 0; i < 50; ++i) {
    const AlgebraVector a = random_cone_element(3, 0.1 + 3.0 * rng.uniform(), rng);
    REQUIRE(is_positive_cone(a));
    const ConeCertificate c = exp_cone_certificate(a);
    CHECK(c.verified);
    const Matrix g = exp_matrix(a).matrix();
    CHECK(g.minCoeff() >= -1e-12);
    CHECK((g.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
  }
  Matrix b(2, 2);
  b << 1, -1, 0, 0;
  CHECK_THROWS_AS(exp_cone_certificate(AlgebraVector(b)), Error);
}

TEST_CASE("example model") {
  const ExampleModel m(1.0, 2.0);
  CHECK(m.a().matrix()(0, 1) == 1.0);
  CHECK(m.b().matrix()(1, 0) == 2.0);
  CHECK(is_positive_cone(m.a()));
  CHECK(is_positive_cone(m.b()));
  Matrix mean(2, 2);
  mean << -0.5, 0.5, 1.0, -1.0;
  CHECK((m.mean().matrix() - mean).norm() < 1e-15);
  const IncrementDistribution dist = m.distribution();
  CHECK(dist.size() == 2);
  CHECK((dist.mean() - m.mean()).norm() < 1e-15);

  for (double n : {1.0, 10.0, 1000.0}) {
    CHECK((m.step_a(n).matrix() - oracle::taylor_exp(m.a().matrix() / n)).norm() < 1e-14);
    CHECK((m.step_b(n).matrix() - oracle::taylor_exp(m.b().matrix() / n)).norm() < 1e-14);
  }
  CHECK_THROWS_AS(ExampleModel(0.0, 1.0), Error);
  CHECK_THROWS_AS(ExampleModel(1.0, -2.0), Error);
  CHECK_THROWS_AS(ExampleModel(NAN, 1.0), Error);
  try {
    ExampleModel(NAN, 1.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
  const AlgebraVector x = ExampleModel::coordinates_to_algebra(0.3, 0.4);
  CHECK(x.matrix()(0, 0) == -0.3);
  CHECK(x.matrix()(1, 1) == -0.4);
}

TEST_CASE("increment distribution validation") {
  const AlgebraVector a = ExampleModel(1, 1).a();
  CHECK_THROWS_AS(IncrementDistribution({{0.5, a}, {0.4, a}}), Error);
  CHECK_THROWS_AS(IncrementDistribution({{1.5, a}, {-0.5, a}}), Error);
  CHECK_THROWS_AS(IncrementDistribution({{0.5, a}, {0.5, AlgebraVector::zero(3)}}), Error);
  CHECK_THROWS_AS(IncrementDistribution(std::vector<Atom>{}), Error);
  const auto pm = IncrementDistribution::point_mass(a);
  CHECK(pm.support_bound() == doctest::Approx(std::sqrt(2.0)));

  const std::vector<double> cum{0.25, 0.5, 1.0};
  CHECK(IncrementDistribution::pick(cum, 0.0) == 0);
  CHECK(IncrementDistribution::pick(cum, 0.3) == 1);
  CHECK(IncrementDistribution::pick(cum, 0.9999) == 2);
}
