#include <doctest.h>

#include <cmath>

#include "liecramer/random.hpp"
#include "liecramer/rate.hpp"
#include "liecramer/stochastic.hpp"
#include "oracles.hpp"

using namespace liecramer;

namespace {

GroupElement s2_group(double m12, double m21) {
  Matrix m(2, 2);
  m << 1 - m12, m12, m21, 1 - m21;
  return GroupElement(m);
}

// gamma^-1 gamma' for gamma = I + c psi(t) N, N = [[-M12, M12], [M21, -M21]].
Matrix displayed_log_derivative(double alpha, double m12, double m21, double t) {
  const double c = 1.0 / (1.0 - std::exp(-alpha));
  Matrix n(2, 2);
  n << -m12, m12, m21, -m21;
  const Matrix gamma = Matrix::Identity(2, 2) + c * (1.0 - std::exp(-alpha * t)) * n;
  const Matrix dgamma = c * alpha * std::exp(-alpha * t) * n;
  return gamma.inverse() * dgamma;
}

}  // namespace

TEST_CASE("one-parameter paths") {
  const ExampleModel model(1.0, 1.0);
  const IncrementDistribution dist = model.distribution();
  CHECK(rate_along_path(dist, PathSpec::one_parameter(model.a())) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(std::abs(rate_along_path(dist, PathSpec::one_parameter(model.mean()))) < 1e-12);
  CHECK(std::isinf(rate_along_path(dist, PathSpec::one_parameter(AlgebraVector::zero(2)))));

  const AlgebraVector x = ExampleModel::coordinates_to_algebra(0.3, 0.7);
  const double expect = legendre(dist, x).value;
  CHECK(std::abs(rate_along_path(dist, PathSpec::one_parameter(x)) - expect) < 1e-12);

  // sampled geodesic and a generic function agree
  std::vector<double> ts;
  std::vector<GroupElement> pts;
  for (int j = 0; j <= 8; ++j) {
    ts.push_back(j / 8.0);
    pts.push_back(exp_matrix((j / 8.0) * x));
  }
  CHECK(std::abs(rate_along_path(dist, PathSpec::sampled(ts, pts)) - expect) < 1e-10);
  const PathSpec f = PathSpec::from_function(2, [&](double t) { return exp_matrix(t * x).matrix(); });
  CHECK(std::abs(rate_along_path(dist, f) - expect) < 1e-6);
  CHECK_THROWS_AS(PathSpec::sampled({0.0, 1.0}, {GroupElement::identity(2)}), Error);
}

TEST_CASE("optimal path log derivative") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    const double s = 1.0 - std::exp(-alpha);
    const double m12 = 0.3 * s, m21 = 0.7 * s;
    const PathSpec p = PathSpec::optimal_s2(alpha, m12, m21);
    CHECK((p.at(0.0).matrix() - Matrix::Identity(2, 2)).norm() < 1e-15);
    CHECK((p.at(1.0).matrix() - s2_group(m12, m21).matrix()).norm() < 1e-14);
    for (double t : {0.1, 0.5, 0.9}) {
      const AlgebraVector an = *p.analytic_log_derivative(t);
      CHECK((an.matrix() - displayed_log_derivative(alpha, m12, m21, t)).norm() < 1e-13);
      const AlgebraVector h1 = finite_difference_log_derivative(p, t, 1e-3);
      const AlgebraVector h2 = finite_difference_log_derivative(p, t, 5e-4);
      const Matrix rich = (4.0 * h2.matrix() - h1.matrix()) / 3.0;
      CHECK((rich - an.matrix()).norm() < 1e-9);

      // psi' = alpha (1 - psi) on the (1,2) entry
      const double g1 = p.at(t).matrix()(0, 1);
      const double dg1 = oracle::central_difference([&](double u) { return p.at(u).matrix()(0, 1); }, t, 1e-5);
      CHECK(std::abs(dg1 - alpha * (m12 / s - g1)) < 1e-8);
    }
    CHECK_THROWS_AS(finite_difference_log_derivative(p, 0.0, 1e-3), Error);
  }
  CHECK_THROWS_AS(optimal_path_s2(1.0, s2_group(0.3, 0.5)), Error);
  try {
    optimal_path_s2(1.0, s2_group(0.3, 0.5));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Infeasible);
  }
}

TEST_CASE("closed-form rate expression") {
  const double s = 1.0 - std::exp(-1.0);
  CHECK(std::isinf(closed_form_rate_s2(s2_group(0.2, 0.2), 1.0)));
  CHECK(std::isinf(closed_form_rate_s2(s2_group(-0.01, s + 0.01), 1.0)));
  const double m12 = 0.2, m21 = s - 0.2;
  const double expect = m12 * std::log(m12 / s) + m21 * std::log(m21 / s) + 0.0 - std::log(0.5) - 1.0;
  CHECK(std::abs(closed_form_rate_s2(s2_group(m12, m21), 1.0) - expect) < 1e-14);
  CHECK(std::isfinite(closed_form_rate_s2(s2_group(0.0, s), 1.0)));
}

TEST_CASE("discretized rate") {
  const ExampleModel model(1.0, 1.0);
  const IncrementDistribution dist = model.distribution();

  // m = 1 is Lambda* of the logarithm
  const AlgebraVector x = ExampleModel::coordinates_to_algebra(0.35, 0.65);
  const DiscretizedRate one = discretized_rate(dist, exp_matrix(x), 1);
  REQUIRE(one.finite);
  CHECK(std::abs(one.value - legendre(dist, x).value) < 1e-9);

  // the mean endpoint costs nothing
  const DiscretizedRate zero = discretized_rate(dist, exp_matrix(model.mean()), 4);
  CHECK(zero.finite);
  CHECK(std::abs(zero.value) < 1e-9);

  // refinement m -> 2m cannot increase the minimum
  const GroupElement g = s2_group(0.2, 1.0 - std::exp(-1.0) - 0.2);
  const DiscretizedRate r4 = discretized_rate(dist, g, 4);
  const DiscretizedRate r8 = discretized_rate(dist, g, 8);
  REQUIRE(r4.finite);
  REQUIRE(r8.finite);
  CHECK(r8.value <= r4.value + 1e-8);
  CHECK(r8.constraint_residual < 1e-9);
  CHECK((psi_m(r8.minimizer).matrix() - g.matrix()).norm() < 1e-8);
  // below the cost of the explicit path
  const double along = rate_along_path(dist, optimal_path_s2(1.0, g));
  CHECK(r8.value < along);

  // off the reachable set
  const DiscretizedRate bad = discretized_rate(dist, s2_group(0.3, 0.05), 4);
  CHECK_FALSE(bad.finite);
  CHECK(std::isinf(bad.value));
}

TEST_CASE("Jensen and segment integrals") {
  const IncrementDistribution dist = ExampleModel(1.0, 1.0).distribution();
  const double s = 1.0 - std::exp(-1.0);
  const PathSpec p = PathSpec::optimal_s2(1.0, 0.15, s - 0.15);
  for (std::size_t m : {1u, 4u, 16u}) {
    const JensenCheck j = jensen_check(dist, p, m);
    CHECK(j.discrete <= j.integral + 1e-12);
  }
  const double g4 = segment_integral_gap(p, 4);
  const double g16 = segment_integral_gap(p, 16);
  CHECK(g16 < g4);
  CHECK(segment_integral_gap(PathSpec::one_parameter(ExampleModel(1, 1).a()), 8) < 1e-14);
}

TEST_CASE("rate report") {
  const IncrementDistribution dist = ExampleModel(1.0, 1.0).distribution();
  const GroupElement g = s2_group(0.2, 1.0 - std::exp(-1.0) - 0.2);
  const RateReport r = rate_report(dist, g, {2, 4}, optimal_path_s2(1.0, g), 1.0);
  CHECK(r.discretized.size() == 2);
  REQUIRE(r.quadrature);
  REQUIRE(r.closed_form);
  CHECK(std::abs(*r.closed_form - *r.quadrature) > 1e-6);
  CHECK_FALSE(r.findings.empty());
}
