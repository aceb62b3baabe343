// Acceptance suite: one PASS/FAIL line per criterion.
// Exit status is 0 when the failing criteria are exactly those listed with
// --expect-fail (comma separated), so a known failure stays visible in the
// output while any change in the outcome is caught.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "liecramer/bch.hpp"
#include "liecramer/ldp.hpp"
#include "liecramer/mc.hpp"
#include "liecramer/random.hpp"
#include "liecramer/rate.hpp"
#include "liecramer/stochastic.hpp"
#include "liecramer/walk.hpp"

using namespace liecramer;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void info(const std::string& s) { std::printf("  info: %s\n", s.c_str()); }

GroupElement s2_group(double m12, double m21) {
  Matrix m(2, 2);
  m << 1 - m12, m12, m21, 1 - m21;
  return GroupElement(m);
}

const double kGap = 1.0 - std::exp(-1.0);

Outcome closed_form_exponentials() {
  double worst = 0.0;
  for (double t : {0.01, 0.1, 1.0}) {
    for (double a : {0.5, 1.0, 2.0}) {
      const ExampleModel model(a, a);
      worst = std::max(worst, (ExampleModel::exp_a(a, t) - exp_matrix(t * model.a()).matrix()).cwiseAbs().maxCoeff());
      worst = std::max(worst, (ExampleModel::exp_b(a, t) - exp_matrix(t * model.b()).matrix()).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-12, fmt("max entrywise difference %.3g (tol 1e-12)", worst)};
}

Outcome legendre_reference() {
  double vertex_err = 0.0, mean_err = 0.0, interior_err = 0.0;
  std::size_t off_finite = 0;
  RandomStream rng(2024, 2);
  for (auto [alpha, beta] : std::vector<std::pair<double, double>>{{1, 1}, {0.5, 2}, {2, 1}}) {
    const ExampleModel model(alpha, beta);
    const LegendreSolver solver(model.distribution());
    vertex_err = std::max({vertex_err, std::abs(solver(model.a()).value - std::log(2.0)),
                           std::abs(solver(model.b()).value - std::log(2.0))});
    mean_err = std::max(mean_err, std::abs(solver(model.mean()).value));
    for (int i = 0; i < 100; ++i) {
      double x1, x2;
      do {
        x1 = -alpha + 3.0 * alpha * rng.uniform();
        x2 = -beta + 3.0 * beta * rng.uniform();
      } while (std::abs(beta * x1 + alpha * x2 - alpha * beta) < 1e-3);
      const LegendreResult r = solver(ExampleModel::coordinates_to_algebra(x1, x2));
      if (r.finite || !std::isinf(r.value)) ++off_finite;
    }
    for (int i = 0; i < 100; ++i) {
      const double s = 0.001 + 0.998 * rng.uniform();
      const double x1 = (1 - s) * alpha, x2 = s * beta;
      const double num = solver(ExampleModel::coordinates_to_algebra(x1, x2)).value;
      interior_err = std::max(interior_err, std::abs(num - legendre_closed_form_s2(x1, x2, alpha, beta)));
    }
  }
  const bool ok = vertex_err <= 1e-8 && mean_err <= 1e-8 && off_finite == 0 && interior_err <= 1e-7;
  return {ok, fmt("vertex err %.2g, mean err %.2g, finite off-constraint %zu/300, closed form vs optimizer %.2g",
                  vertex_err, mean_err, off_finite, interior_err)};
}

Outcome bch_bounds() {
  std::size_t failures = 0;
  double worst = 0.0;
  for (std::size_t d : {2u, 3u}) {
    for (std::uint64_t i = 0; i < 10000; ++i) {
      RandomStream rx(0, 2 * i), ry(0, 2 * i + 1);
      const AlgebraVector x = random_algebra_element(d, 0.2, rx);
      const AlgebraVector y = random_algebra_element(d, 0.2, ry);
      const BoundCertificate c = verify_log_product(x, y);
      if (!c.pass) ++failures;
      if (c.rhs > 0) worst = std::max(worst, c.lhs / c.rhs);
    }
  }
  return {failures == 0, fmt("%zu failures over 2 x 10^4 pairs, max lhs/rhs %.3f", failures, worst)};
}

Outcome replacement_bound() {
  const IncrementDistribution dist = ExampleModel(1.0, 1.0).distribution();
  std::size_t failures = 0, improved = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const WalkTrajectory w = simulate_walk(dist, 10000, seed);
    const ReplacementCertificate c20 = replacement_deviation(w, dist, 20);
    const ReplacementCertificate c100 = replacement_deviation(w, dist, 100);
    failures += !c20.pass + !c100.pass;
    if (c100.max_deviation < c20.max_deviation) ++improved;
  }
  return {failures == 0 && improved >= 95,
          fmt("%zu certificate failures, m = 100 below m = 20 on %zu/100 seeds", failures, improved)};
}

Outcome rate_cross_validation() {
  const IncrementDistribution dist = ExampleModel(1.0, 1.0).distribution();
  bool ok = true;
  for (double m12 : {0.1, 0.2, kGap / 2.0, 0.4, 0.55}) {
    const GroupElement g = s2_group(m12, kGap - m12);
    const DiscretizedRate d = discretized_rate(dist, g, 32);
    const double path = rate_along_path(dist, optimal_path_s2(1.0, g));
    const double cf = closed_form_rate_s2(g, 1.0);
    const double diff = std::abs(d.value - path);
    const bool pass = d.finite && diff <= std::max(1e-4, 0.01 * std::abs(path));
    ok = ok && pass;
    info(fmt("M12 = %.6f: discretized(m=32) %.6f, path quadrature %.6f, closed form %.6f, |diff| %.2e rel %.2f%% %s",
             m12, d.value, path, cf, diff, path > 0 ? 100.0 * diff / path : 0.0, pass ? "ok" : "exceeds tol"));
    if (std::abs(cf - path) > 1e-6) info(fmt("finding: closed-form expression differs from the path quadrature by %.4g", cf - path));
  }
  return {ok, ok ? "discretized minimum agrees with the closed-form path"
                 : "discretized minimum lies below the closed-form path: that path is not the minimizer"};
}

Outcome zero_of_rate() {
  const ExampleModel model(1.0, 1.0);
  const IncrementDistribution dist = model.distribution();
  const GroupElement g = exp_matrix(model.mean());
  double worst = 0.0;
  bool finite = true;
  for (std::size_t m : {4u, 8u, 16u}) {
    const DiscretizedRate r = discretized_rate(dist, g, m);
    finite = finite && r.finite;
    worst = std::max(worst, r.value);
  }
  const double along = rate_along_path(dist, PathSpec::one_parameter(model.mean()));
  return {finite && worst <= 1e-8 && along <= 1e-10,
          fmt("max discretized %.2g (tol 1e-8), along exp(tEX) %.2g (tol 1e-10)", worst, along)};
}

Outcome ldp_trend() {
  const ExampleModel model(1.0, 1.0);
  const IncrementDistribution dist = model.distribution();
  const RateCurve typical = empirical_rate_curve(dist, BallEvent(exp_matrix(model.mean()), 0.05),
                                                 {20, 40, 80, 160}, 100000, 7, TiltSpec{});
  for (const auto& p : typical.points) {
    info(fmt("typical n = %zu: p_hat %.4g, rate %.4f [%.4f, %.4f]", p.n, p.estimate.p_hat, p.rate,
             p.rate_lower, p.rate_upper));
  }
  const double last = typical.points.back().rate;
  const bool monotone = non_increasing_with_overlap(typical);

  const AlgebraVector xc = ExampleModel::coordinates_to_algebra(0.2, 0.8);
  const GroupElement center = exp_matrix(xc);
  const DiscretizedRate rstar = discretized_rate(dist, center, 32);
  const RateCurve rare = empirical_rate_curve(dist, BallEvent(center, 0.05), {160}, 100000, 8,
                                              TiltSpec{TiltPolicy::Auto, std::nullopt});
  const RateCurvePoint& p = rare.points.back();
  info(fmt("atypical n = 160: p_hat %.4g, ESS %.0f, rate %.4f, R* %.4f", p.estimate.p_hat, p.estimate.ess, p.rate,
           rstar.value));
  const bool within = rstar.finite && p.rate >= 0.5 * rstar.value && p.rate <= 1.5 * rstar.value &&
                      !p.estimate.degenerate;
  return {last < 0.05 && monotone && within,
          fmt("typical rate at n = 160 %.4f (< 0.05), non-increasing %s; tilted rate %.4f in [%.4f, %.4f] %s", last,
              monotone ? "yes" : "no", p.rate, 0.5 * rstar.value, 1.5 * rstar.value, within ? "yes" : "no")};
}

Outcome refinement() {
  const IncrementDistribution dist = ExampleModel(1.0, 1.0).distribution();
  bool ok = true;
  double worst = -1e300;
  for (double m12 : {0.1, 0.25, 0.5}) {
    const GroupElement g = s2_group(m12, kGap - m12);
    double prev = discretized_rate(dist, g, 4).value;
    for (std::size_t m : {8u, 16u, 32u}) {
      const double v = discretized_rate(dist, g, m).value;
      worst = std::max(worst, v - prev);
      ok = ok && v <= prev + 1e-6;
      prev = v;
    }
  }
  return {ok, fmt("max increase I_2m - I_m = %.3g (tol 1e-6)", worst)};
}

Outcome fundamental_theorem() {
  // values below this are rounding noise
  constexpr double kFloor = 1e-12;
  auto decays = [&](const PathSpec& path, const char* name) {
    bool ok = true;
    double prev = -1.0;
    std::string line = std::string(name) + ":";
    for (std::size_t m : {8u, 16u, 32u, 64u}) {
      const double v = static_cast<double>(m) * segment_integral_gap(path, m);
      line += fmt(" m=%zu %.3e", m, v);
      if (prev >= 0.0 && v > 1.1 * prev && v > kFloor) ok = false;
      prev = v;
    }
    info(line);
    return ok;
  };
  const bool optimal = decays(PathSpec::optimal_s2(1.0, 0.2, kGap - 0.2), "optimal path");
  const ExampleModel model(1.0, 1.0);
  const AlgebraVector x = model.a(), y = model.b();
  const bool curved = decays(PathSpec::from_function(2, [&](double t) {
                               return (exp_matrix(t * x) * exp_matrix((t * t) * y)).matrix();
                             }),
                             "exp(tA) exp(t^2 B)");
  return {optimal && curved, fmt("m * max segment gap non-increasing within 10%%: optimal %s, curved %s",
                                 optimal ? "yes" : "no", curved ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::size_t> expected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--expect-fail" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string item;
      while (std::getline(ss, item, ',')) expected.insert(std::strtoul(item.c_str(), nullptr, 10));
    } else {
      std::fprintf(stderr, "usage: acceptance [--expect-fail N[,N...]]\n");
      return 2;
    }
  }
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"closed-form exponentials", closed_form_exponentials},
      {"Legendre reference values", legendre_reference},
      {"BCH log-product bound", bch_bounds},
      {"replacement bound", replacement_bound},
      {"rate cross-validation", rate_cross_validation},
      {"zero of the rate function", zero_of_rate},
      {"LDP trend", ldp_trend},
      {"discretization refinement", refinement},
      {"segment-log decay", fundamental_theorem},
  };
  int failed = 0;
  std::set<std::size_t> failing;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %zu %s: %s (%.1f s) %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, secs,
                o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
    if (!o.pass) failing.insert(i + 1);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  if (!expected.empty()) {
    std::printf("expected failures:");
    for (std::size_t c : expected) std::printf(" %zu", c);
    std::printf(" (%s)\n", failing == expected ? "matched" : "MISMATCH");
    return failing == expected ? 0 : 1;
  }
  return failed ? 1 : 0;
}
