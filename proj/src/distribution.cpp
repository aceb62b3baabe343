#include "liecramer/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace liecramer {

IncrementDistribution::IncrementDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) fail(ErrorKind::InvalidArgument, "IncrementDistribution: no atoms");
  const std::size_t d = atoms_.front().vector.dim();
  if (d < 2) fail(ErrorKind::InvalidDimension, "IncrementDistribution: dimension must be >= 2");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const auto& a = atoms_[i];
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      std::ostringstream os;
      os << "IncrementDistribution: weight of atom " << i << " must be positive (got " << a.weight << ")";
      fail(ErrorKind::InvalidArgument, os.str());
    }
    if (a.vector.dim() != d) {
      fail(ErrorKind::InvalidArgument, "IncrementDistribution: atoms have mixed dimensions");
    }
    total += a.weight;
    support_bound_ = std::max(support_bound_, a.vector.norm());
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "IncrementDistribution: weights sum to " << total << ", expected 1";
    fail(ErrorKind::InvalidArgument, os.str());
  }
}

IncrementDistribution IncrementDistribution::point_mass(const AlgebraVector& x) {
  return IncrementDistribution({{1.0, x}});
}

AlgebraVector IncrementDistribution::mean() const {
  AlgebraVector m = AlgebraVector::zero(dim());
  for (const auto& a : atoms_) m = m + a.weight * a.vector;
  return m;
}

std::vector<double> IncrementDistribution::cumulative_weights() const {
  std::vector<double> c;
  c.reserve(atoms_.size());
  double acc = 0.0;
  for (const auto& a : atoms_) {
    acc += a.weight;
    c.push_back(acc);
  }
  return c;
}

std::size_t IncrementDistribution::pick(const std::vector<double>& cumulative, double u) {
  const double target = u * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

}  // namespace liecramer
