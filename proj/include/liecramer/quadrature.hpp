#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace liecramer {

/// Gauss-Legendre nodes and weights on [0, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

QuadratureRule gauss_legendre(std::size_t count);

/// Composite rule: `subintervals` equal pieces of [a, b], `count` nodes each.
QuadratureRule composite_gauss_legendre(double a, double b, std::size_t subintervals, std::size_t count);

}  // namespace liecramer
