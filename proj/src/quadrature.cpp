#include "liecramer/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "liecramer/error.hpp"

namespace liecramer {

QuadratureRule gauss_legendre(std::size_t count) {
  if (count == 0) fail(ErrorKind::InvalidArgument, "gauss_legendre: need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(count);
  rule.weights.resize(count);
  const auto n = static_cast<double>(count);
  // Newton on P_n from the Chebyshev-like initial guess; nodes come out in
  // decreasing order on [-1, 1] and are mapped to increasing order on [0, 1].
  for (std::size_t i = 0; i < (count + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= count; ++k) {
        const auto kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= count; ++k) {
      const auto kk = static_cast<double>(k);
      const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[count - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = 0.5 * w;
    rule.weights[count - 1 - i] = 0.5 * w;
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(double a, double b, std::size_t subintervals, std::size_t count) {
  if (subintervals == 0) fail(ErrorKind::InvalidArgument, "composite_gauss_legendre: no subintervals");
  const QuadratureRule base = gauss_legendre(count);
  QuadratureRule rule;
  const double h = (b - a) / static_cast<double>(subintervals);
  for (std::size_t s = 0; s < subintervals; ++s) {
    const double lo = a + h * static_cast<double>(s);
    for (std::size_t i = 0; i < count; ++i) {
      rule.nodes.push_back(lo + h * base.nodes[i]);
      rule.weights.push_back(h * base.weights[i]);
    }
  }
  return rule;
}

}  // namespace liecramer
