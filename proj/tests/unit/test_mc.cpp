#include <doctest.h>

#include <cmath>

#include "liecramer/mc.hpp"
#include "liecramer/stochastic.hpp"

using namespace liecramer;

TEST_CASE("ball event") {
  const GroupElement c = exp_matrix(ExampleModel(1, 1).mean());
  const BallEvent ball(c, 0.1);
  CHECK(ball.contains(c));
  CHECK_FALSE(ball.contains(GroupElement::identity(2)));
  CHECK(ball.contains(c * exp_matrix((0.09 / std::sqrt(2.0)) * ExampleModel(1, 1).a())));
  CHECK_FALSE(ball.contains(c * exp_matrix((0.11 / std::sqrt(2.0)) * ExampleModel(1, 1).a())));
  CHECK_THROWS_AS(BallEvent(c, 0.0), Error);
  CHECK_THROWS_AS(BallEvent(c, -1.0), Error);
}

TEST_CASE("Wilson interval") {
  auto [lo, hi] = wilson_interval(50, 100);
  CHECK(lo == doctest::Approx(0.40383).epsilon(1e-4));
  CHECK(hi == doctest::Approx(0.59617).epsilon(1e-4));
  auto [lo0, hi0] = wilson_interval(0, 100);
  CHECK(lo0 == 0.0);
  CHECK(hi0 == doctest::Approx(2.705543 / 102.705543).epsilon(1e-6));
  auto [lo1, hi1] = wilson_interval(100, 100);
  CHECK(hi1 == 1.0);
  CHECK(lo1 < 1.0);
  CHECK_THROWS_AS(wilson_interval(0, 0), Error);
}

TEST_CASE("point mass hits with certainty") {
  const AlgebraVector a = ExampleModel(1, 1).a();
  const IncrementDistribution pm = IncrementDistribution::point_mass(a);
  const ProbabilityEstimate e = estimate_probability(pm, 10, BallEvent(exp_matrix(a), 1e-6), 1000, 1);
  CHECK(e.hits == 1000);
  CHECK(e.p_hat == 1.0);
  CHECK_THROWS_AS(estimate_probability(pm, 10, BallEvent(exp_matrix(a), 0.1), 0, 1), Error);
  CHECK_THROWS_AS(estimate_probability(pm, 0, BallEvent(exp_matrix(a), 0.1), 10, 1), Error);
}

TEST_CASE("plain estimator") {
  const ExampleModel model(1.0, 1.0);
  const IncrementDistribution dist = model.distribution();
  const GroupElement center = exp_matrix(model.mean());
  const BallEvent ball(center, 0.05);

  const ProbabilityEstimate a = estimate_probability(dist, 20, ball, 20000, 9, 1);
  const ProbabilityEstimate b = estimate_probability(dist, 20, ball, 20000, 9, 3);
  CHECK(a.hits == b.hits);
  CHECK(a.p_hat == b.p_hat);
  CHECK(a.lower <= a.p_hat);
  CHECK(a.p_hat <= a.upper);

  // wider balls catch more
  std::size_t prev = 0;
  for (double r : {0.02, 0.05, 0.1, 0.3}) {
    const ProbabilityEstimate e = estimate_probability(dist, 20, BallEvent(center, r), 5000, 4);
    CHECK(e.hits >= prev);
    prev = e.hits;
  }

  // lambda = 0 goes through the same draws
  const ProbabilityEstimate z = tilted_estimator(dist, 20, ball, 20000, AlgebraVector::zero(2), 9);
  CHECK(z.hits == a.hits);
  CHECK(z.p_hat == a.p_hat);
  CHECK_FALSE(z.tilted);
}

TEST_CASE("estimator is unbiased across seeds") {
  // exact hit probability at n = 4 by enumerating the 16 sequences
  const ExampleModel model(1.0, 1.0);
  const IncrementDistribution dist = model.distribution();
  const BallEvent ball(exp_matrix(model.mean()), 0.3);
  double exact = 0.0;
  for (int mask = 0; mask < 16; ++mask) {
    Matrix acc = Matrix::Identity(2, 2);
    for (int i = 0; i < 4; ++i) acc = acc * exp_matrix(0.25 * ((mask >> i) & 1 ? model.b() : model.a())).matrix();
    if (ball.contains(acc)) exact += 1.0 / 16.0;
  }
  REQUIRE(exact > 0.0);
  REQUIRE(exact < 1.0);
  double mean = 0.0;
  int covered = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ProbabilityEstimate e = estimate_probability(dist, 4, ball, 2000, seed);
    mean += e.p_hat / 50.0;
    if (e.lower <= exact && exact <= e.upper) ++covered;
  }
  CHECK(std::abs(mean - exact) < 4.0 * std::sqrt(exact * (1 - exact) / 100000.0));
  CHECK(covered >= 43);
}

TEST_CASE("tilted estimator agrees with plain sampling") {
  const ExampleModel model(1.0, 1.0);
  const IncrementDistribution dist = model.distribution();
  const BallEvent ball(exp_matrix(ExampleModel::coordinates_to_algebra(0.2, 0.8)), 0.05);
  const auto lam = auto_tilt(dist, ball);
  REQUIRE(lam);
  const ProbabilityEstimate plain = estimate_probability(dist, 15, ball, 100000, 1);
  const ProbabilityEstimate tilt = tilted_estimator(dist, 15, ball, 100000, *lam, 2);
  CHECK(tilt.tilted);
  CHECK_FALSE(tilt.degenerate);
  REQUIRE(plain.hits > 100);
  const double diff = std::abs(tilt.p_hat - plain.p_hat);
  CHECK(diff < 4.0 * std::hypot(tilt.std_error, plain.std_error));
  CHECK(tilt.std_error < plain.std_error);

  // no tilt when the centre's logarithm is off the hull
  CHECK_FALSE(auto_tilt(dist, BallEvent(exp_matrix(ExampleModel::coordinates_to_algebra(0.5, 0.8)), 0.05)));
}

TEST_CASE("rate curve") {
  const ExampleModel model(1.0, 1.0);
  const IncrementDistribution dist = model.distribution();
  const BallEvent ball(exp_matrix(model.mean()), 0.05);
  const RateCurve c = empirical_rate_curve(dist, ball, {10, 20, 40}, 20000, 3, TiltSpec{});
  CHECK(c.points.size() == 3);
  CHECK_FALSE(c.disclaimer.empty());
  for (const auto& p : c.points) {
    CHECK(p.rate_lower <= p.rate);
    CHECK(p.rate <= p.rate_upper);
    CHECK(std::abs(p.rate + std::log(p.estimate.p_hat) / p.n) < 1e-14);
  }
  CHECK(non_increasing_with_overlap(c));
  CHECK_THROWS_AS(empirical_rate_curve(dist, ball, {20, 10}, 100, 1, TiltSpec{}), Error);
  CHECK_THROWS_AS(empirical_rate_curve(dist, ball, {10}, 0, 1, TiltSpec{}), Error);
  CHECK_THROWS_AS(empirical_rate_curve(dist, ball, {10}, 10, 1, TiltSpec{TiltPolicy::Fixed, std::nullopt}), Error);
  CHECK(parse_tilt_policy("auto") == TiltPolicy::Auto);
  CHECK_THROWS_AS(parse_tilt_policy("bogus"), Error);
  CHECK(std::string(to_string(TiltPolicy::Fixed)) == "fixed");
}
