#include <doctest.h>

#include <cmath>

#include "liecramer/random.hpp"
#include "liecramer/stochastic.hpp"
#include "liecramer/walk.hpp"
#include "oracles.hpp"

using namespace liecramer;

TEST_CASE("walk determinism and endpoint") {
  const IncrementDistribution dist = ExampleModel(1.0, 2.0).distribution();
  const WalkTrajectory a = simulate_walk(dist, 500, 42);
  const WalkTrajectory b = simulate_walk(dist, 500, 42);
  const WalkTrajectory c = simulate_walk(dist, 500, 43);
  CHECK(a.endpoint().matrix() == b.endpoint().matrix());
  CHECK(a.endpoint().matrix() != c.endpoint().matrix());
  CHECK(a.stores_all_points());

  Matrix direct = Matrix::Identity(2, 2);
  for (std::size_t k = 1; k <= a.steps(); ++k) {
    direct = direct * oracle::taylor_exp(a.increment(k).matrix() / 500.0);
  }
  CHECK((direct - a.endpoint().matrix()).norm() < 1e-12);
  CHECK(is_group_member(a.endpoint().matrix()).member);
  CHECK_THROWS_AS(a.increment(0), Error);
  CHECK_THROWS_AS(a.point(501), Error);
  CHECK_THROWS_AS(simulate_walk(dist, 0, 1), Error);
}

TEST_CASE("checkpointed storage reproduces every point") {
  const IncrementDistribution dist = ExampleModel(1.0, 1.0).distribution();
  const WalkTrajectory full = simulate_walk(dist, 1000, 3, 1);
  const WalkTrajectory sparse = simulate_walk(dist, 1000, 3, 64);
  CHECK_FALSE(sparse.stores_all_points());
  for (std::size_t k : {0u, 1u, 63u, 64u, 65u, 500u, 999u, 1000u}) {
    CHECK((full.point(k).matrix() - sparse.point(k).matrix()).norm() < 1e-13);
  }
}

TEST_CASE("segment decomposition") {
  const IncrementDistribution dist = ExampleModel(1.0, 2.0).distribution();
  const WalkTrajectory w = simulate_walk(dist, 103, 8);
  const SegmentDecomposition s = segment_decomposition(w, 4);
  REQUIRE(s.boundaries.size() == 5);
  CHECK(s.boundaries.front() == 0);
  CHECK(s.boundaries.back() == 103);
  const PathDiscretization logs = s.segment_logs();
  CHECK((psi_m(logs).matrix() - w.endpoint().matrix()).norm() < 1e-12);
  for (std::size_t l = 1; l <= 4; ++l) {
    const std::size_t len = s.boundaries[l] - s.boundaries[l - 1];
    CHECK(s.logs[l - 1].size() == len);
    const Matrix seg = w.point(s.boundaries[l - 1]).inverse().matrix() * w.point(s.boundaries[l]).matrix();
    CHECK((oracle::mercator_log(seg) - logs[l - 1].matrix()).norm() < 1e-10);
  }
  CHECK_THROWS_AS(segment_decomposition(w, 0), Error);
  CHECK_THROWS_AS(segment_decomposition(w, 104), Error);
}

TEST_CASE("replacement certificate") {
  const IncrementDistribution dist = ExampleModel(1.0, 2.0).distribution();
  CHECK(kappa_for(dist) >= ad_ratio_for_dimension(2));
  ReplacementCertificate all;
  bool first = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const WalkTrajectory w = simulate_walk(dist, 2000, seed);
    const ReplacementCertificate c = replacement_deviation(w, dist, 16);
    CHECK(c.pass);
    CHECK(c.max_deviation > 0.0);
    CHECK(c.max_deviation <= c.bound);
    all = first ? c : all.merge(c);
    first = false;
  }
  CHECK(all.pass);
  const double step = dist.support_bound() / 16.0;
  CHECK(all.bound == doctest::Approx(c_constant(kappa_for(dist) * step) * step));

  // a bound forced to zero must fail
  const WalkTrajectory w = simulate_walk(dist, 200, 1);
  CHECK_FALSE(replacement_deviation(w, 4, 0.0, dist.support_bound()).pass);
}

TEST_CASE("psi_m and continuity") {
  RandomStream rng(2);
  PathDiscretization x;
  for (int i = 0; i < 3; ++i) x.push_back(random_algebra_element(3, 0.1, rng));
  Matrix prod = Matrix::Identity(3, 3);
  for (const auto& v : x) prod = prod * oracle::taylor_exp(v.matrix());
  CHECK((psi_m(x).matrix() - prod).norm() < 1e-13);
  CHECK_THROWS_AS(psi_m(PathDiscretization{}), Error);

  // m = 1 reduces to |log(e^{-X} e^{Y})| against C |X - Y|
  const AlgebraVector a = random_algebra_direction(2, 0.2, rng);
  const AlgebraVector b = random_algebra_direction(2, 0.2, rng);
  const BoundCertificate c = psi_m_continuity_check({a}, {b}, 0.2, 2.0);
  CHECK(std::abs(c.lhs - log_matrix(exp_matrix(-a) * exp_matrix(b)).norm()) < 1e-13);
  CHECK(c.pass);

  const double emp = empirical_continuity_constant(2, 0.2, 4, 200, 5);
  CHECK(emp > 0.5);
  CHECK(emp < 2.0);
  CHECK_THROWS_AS(psi_m_continuity_check({a, a}, {b, b}, 0.2, 2.0), Error);
}
