#include "liecramer/walk.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "liecramer/random.hpp"

namespace liecramer {

const AlgebraVector& WalkTrajectory::increment(std::size_t k) const {
  if (k == 0 || k > steps()) fail(ErrorKind::InvalidArgument, "WalkTrajectory::increment: index out of range");
  return atoms_[atom_index_[k - 1]];
}

GroupElement WalkTrajectory::point(std::size_t k) const {
  if (k > steps()) fail(ErrorKind::InvalidArgument, "WalkTrajectory::point: index out of range");
  if (stride_ == 1) return points_[k];
  if (k == steps()) return points_.back();
  const std::size_t j = k / stride_;
  Matrix acc = points_[j].matrix();
  for (std::size_t i = j * stride_ + 1; i <= k; ++i) acc = acc * steps_[atom_index_[i - 1]];
  return GroupElement(std::move(acc));
}

WalkTrajectory simulate_walk(const IncrementDistribution& dist, std::size_t n, std::uint64_t seed,
                             std::size_t checkpoint_stride) {
  if (n == 0) fail(ErrorKind::InvalidArgument, "simulate_walk: n must be positive");
  WalkTrajectory t;
  t.dim_ = dist.dim();
  const double scale = 1.0 / static_cast<double>(n);
  for (const auto& a : dist.atoms()) {
    t.atoms_.push_back(a.vector);
    t.steps_.push_back(exp_matrix(scale * a.vector).matrix());
  }
  if (checkpoint_stride == 0) {
    checkpoint_stride = n <= WalkTrajectory::kFullStorageLimit ? 1 : std::max<std::size_t>(1, n / 1000);
  }
  t.stride_ = checkpoint_stride;

  const std::vector<double> cumulative = dist.cumulative_weights();
  RandomStream rng(seed);
  t.atom_index_.reserve(n);
  t.points_.reserve(n / t.stride_ + 2);
  const auto d = static_cast<Eigen::Index>(t.dim_);
  Matrix acc = Matrix::Identity(d, d);
  Matrix tmp(d, d);
  t.points_.push_back(GroupElement::identity(t.dim_));
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t idx = IncrementDistribution::pick(cumulative, rng.uniform());
    t.atom_index_.push_back(idx);
    tmp.noalias() = acc * t.steps_[idx];
    acc.swap(tmp);
    if (k % t.stride_ == 0 || k == n) t.points_.emplace_back(acc);
  }
  return t;
}

PathDiscretization SegmentDecomposition::segment_logs() const {
  PathDiscretization out;
  out.reserve(logs.size());
  for (const auto& seg : logs) out.push_back(seg.back());
  return out;
}

SegmentDecomposition segment_decomposition(const WalkTrajectory& traj, std::size_t m) {
  const std::size_t n = traj.steps();
  if (m == 0 || m > n) {
    fail(ErrorKind::InvalidArgument, "segment_decomposition: need 1 <= m <= n");
  }
  SegmentDecomposition s;
  s.m = m;
  const std::size_t width = n / m;
  for (std::size_t l = 0; l < m; ++l) s.boundaries.push_back(l * width);
  s.boundaries.push_back(n);
  s.logs.resize(m);
  for (std::size_t l = 1; l <= m; ++l) {
    const std::size_t start = s.boundaries[l - 1];
    const GroupElement base_inv = traj.point(start).inverse();
    for (std::size_t k = 1; k <= s.boundaries[l] - start; ++k) {
      const Matrix target = base_inv.matrix() * traj.point(start + k).matrix();
      try {
        s.logs[l - 1].push_back(log_matrix(GroupElement(target)));
      } catch (const Error& e) {
        std::ostringstream os;
        os << "segment_decomposition: segment " << l << " step " << k
           << " has no logarithm; increase m (" << e.what() << ")";
        fail(ErrorKind::OutOfDomain, os.str());
      }
    }
  }
  return s;
}

ReplacementCertificate ReplacementCertificate::merge(const ReplacementCertificate& other) const {
  ReplacementCertificate r = *this;
  r.max_deviation = std::max(max_deviation, other.max_deviation);
  r.bound = std::min(bound, other.bound);
  r.pass = pass && other.pass;
  return r;
}

double ad_ratio_for_dimension(std::size_t d) {
  static std::mutex mutex;
  static std::map<std::size_t, double> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(d);
  if (it != cache.end()) return it->second;
  const double k = ad_norm_ratio(d, 4000, 0x6b61707061ULL);
  cache.emplace(d, k);
  return k;
}

double kappa_for(const IncrementDistribution& dist) {
  double k = ad_ratio_for_dimension(dist.dim());
  for (const auto& a : dist.atoms()) {
    const double nrm = a.vector.norm();
    if (nrm > 0.0) k = std::max(k, ad_operator(a.vector).norm() / nrm);
  }
  return k;
}

ReplacementCertificate replacement_deviation(const WalkTrajectory& traj, std::size_t m,
                                             double kappa, double support_bound) {
  const std::size_t n = traj.steps();
  if (m == 0 || m > n) fail(ErrorKind::InvalidArgument, "replacement_deviation: need 1 <= m <= n");
  const std::size_t kmax = n / m;
  ReplacementCertificate c;
  c.kappa = kappa;
  c.support_bound = support_bound;
  const double inv_n = 1.0 / static_cast<double>(n);
  Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(traj.dim()), static_cast<Eigen::Index>(traj.dim()));
  for (std::size_t k = 1; k <= kmax; ++k) {
    sum += inv_n * traj.increment(k).matrix();
    AlgebraVector l;
    try {
      l = log_matrix(traj.point(k));
    } catch (const Error& e) {
      fail(ErrorKind::OutOfDomain,
           std::string("replacement_deviation: log(sigma_k) undefined; increase m (") + e.what() + ")");
    }
    c.max_deviation = std::max(c.max_deviation, (l.matrix() - sum).norm());
  }
  const double step = support_bound / static_cast<double>(m);
  c.bound = c_constant(kappa * step) * step;
  c.pass = c.max_deviation <= c.bound + kCertificateSlack;
  return c;
}

ReplacementCertificate replacement_deviation(const WalkTrajectory& traj,
                                             const IncrementDistribution& dist, std::size_t m) {
  return replacement_deviation(traj, m, kappa_for(dist), dist.support_bound());
}

GroupElement psi_m(const PathDiscretization& segments) {
  if (segments.empty()) fail(ErrorKind::InvalidArgument, "psi_m: empty discretization");
  Matrix acc = Matrix::Identity(static_cast<Eigen::Index>(segments.front().dim()),
                                static_cast<Eigen::Index>(segments.front().dim()));
  for (const auto& x : segments) acc = acc * exp_matrix(x).matrix();
  return GroupElement(std::move(acc));
}

BoundCertificate psi_m_continuity_check(const PathDiscretization& x, const PathDiscretization& y,
                                        double r, double constant) {
  if (x.size() != y.size() || x.empty()) {
    fail(ErrorKind::InvalidArgument, "psi_m_continuity_check: discretizations differ in length");
  }
  const double cap = r / static_cast<double>(x.size()) + 1e-12;
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].norm() > cap || y[i].norm() > cap) {
      fail(ErrorKind::OutOfDomain, "psi_m_continuity_check: segment exceeds r/m");
    }
    sum += (x[i] - y[i]).norm();
  }
  const double lhs = distance_proxy(psi_m(x), psi_m(y));
  return make_certificate(lhs, constant * sum, constant);
}

double empirical_continuity_constant(std::size_t d, double r, std::size_t m, std::size_t pairs,
                                     std::uint64_t seed) {
  RandomStream rng(seed, 0x707369ULL + m);
  const double cap = r / static_cast<double>(m);
  double best = 0.0;
  for (std::size_t p = 0; p < pairs; ++p) {
    PathDiscretization x;
    PathDiscretization y;
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      x.push_back(random_algebra_element(d, cap, rng));
      y.push_back(random_algebra_element(d, cap, rng));
      sum += (x.back() - y.back()).norm();
    }
    if (sum == 0.0) continue;
    best = std::max(best, distance_proxy(psi_m(x), psi_m(y)) / sum);
  }
  return best;
}

}  // namespace liecramer
