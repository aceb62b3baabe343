#include "liecramer/random.hpp"

#include <cmath>

namespace liecramer {

namespace {

std::seed_seq make_seed(std::uint64_t seed, std::uint64_t stream) {
  return std::seed_seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                       static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(stream & 0xffffffffu),
                       static_cast<std::uint32_t>(stream >> 32)};
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream) {
  auto seq = make_seed(seed, stream);
  engine_.seed(seq);
}

AlgebraVector random_algebra_direction(std::size_t d, double norm, RandomStream& rng) {
  const auto basis = algebra_basis(d);
  Vector c(static_cast<Eigen::Index>(basis.size()));
  do {
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = rng.normal();
  } while (c.norm() == 0.0);
  c *= norm / c.norm();
  return from_coordinates(d, c);
}

AlgebraVector random_algebra_element(std::size_t d, double radius, RandomStream& rng) {
  const double dim = static_cast<double>(d * d - d);
  const double r = radius * std::pow(rng.uniform(), 1.0 / dim);
  return random_algebra_direction(d, r, rng);
}

AlgebraVector random_cone_element(std::size_t d, double norm, RandomStream& rng) {
  const auto n = static_cast<Eigen::Index>(d);
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      m(i, j) = rng.uniform();
      row += m(i, j);
    }
    m(i, i) = -row;
  }
  const double f = m.norm();
  if (f > 0.0) m *= norm / f;
  return AlgebraVector::project(m);
}

}  // namespace liecramer
