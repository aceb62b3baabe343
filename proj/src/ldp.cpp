#include "liecramer/ldp.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "liecramer/simplex.hpp"

namespace liecramer {

const char* to_string(DomainClass c) noexcept {
  switch (c) {
    case DomainClass::Inside: return "inside";
    case DomainClass::Boundary: return "boundary";
    case DomainClass::Outside: return "outside";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Hull {
  Vector mean;
  Matrix directions;  // D x k, orthonormal columns
};

Hull affine_hull(const Vector& w, const Matrix& p) {
  Hull h;
  h.mean = p * w;
  const Matrix centered = p.colwise() - h.mean;
  if (centered.cols() < 2) {
    h.directions = Matrix::Zero(p.rows(), 0);
    return h;
  }
  Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  const double cutoff = 1e-10 * std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);
  Eigen::Index k = 0;
  while (k < sv.size() && sv[k] > cutoff) ++k;
  h.directions = svd.matrixU().leftCols(k);
  return h;
}

struct CoreResult {
  double value = kInf;
  DomainClass domain = DomainClass::Outside;
  Vector lambda;  // algebra coordinates; empty unless attained
  double gradient_norm = 0.0;
  int iterations = 0;
};

// Barycentric weights of the minimal face containing z, or nullopt if z is
// outside conv{Z_j}. Entry j is > 0 iff atom j belongs to the face.
std::optional<Vector> face_weights(const Matrix& z_atoms, const Vector& z) {
  const Eigen::Index k = z_atoms.rows();
  const Eigen::Index n = z_atoms.cols();
  Matrix a(k + 1, n);
  a.topRows(k) = z_atoms;
  a.row(k).setOnes();
  Vector b(k + 1);
  b.head(k) = z;
  b[k] = 1.0;
  const double tol = LegendreSolver::kDomainTol;

  if (n == k + 1) {
    // Affinely independent atoms: barycentric coordinates are unique.
    Vector p = a.fullPivLu().solve(b);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (p[j] < -tol) return std::nullopt;
      if (p[j] <= tol) p[j] = 0.0;
    }
    return p;
  }

  Vector best = Vector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Vector c = Vector::Zero(n);
    c[j] = 1.0;
    const auto sol = solve_lp(c, a, b, tol);
    if (!sol) return std::nullopt;
    best[j] = sol->x[j] > tol ? sol->x[j] : 0.0;
  }
  return best;
}

CoreResult solve_core(const Vector& w, const Matrix& points, const Vector& x,
                      const Hull* precomputed = nullptr);

CoreResult solve_on_face(const Vector& w, const Matrix& points, const Vector& x, const Vector& face) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index j = 0; j < face.size(); ++j) {
    if (face[j] > 0.0) idx.push_back(j);
  }
  Vector wf(static_cast<Eigen::Index>(idx.size()));
  Matrix pf(points.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    wf[static_cast<Eigen::Index>(i)] = w[idx[i]];
    pf.col(static_cast<Eigen::Index>(i)) = points.col(idx[i]);
  }
  const double mass = wf.sum();
  CoreResult r = solve_core(wf / mass, pf, x);
  if (r.domain == DomainClass::Outside) return r;
  r.value -= std::log(mass);
  r.domain = DomainClass::Boundary;
  r.lambda = Vector();
  return r;
}

CoreResult newton(const Vector& w, const Matrix& z_atoms, const Vector& z) {
  const Eigen::Index k = z_atoms.rows();
  const Eigen::Index n = z_atoms.cols();
  const Vector logw = w.array().log();

  auto objective = [&](const Vector& eta) {
    const Vector s = (z_atoms.transpose() * eta) + logw;
    const double smax = s.maxCoeff();
    return eta.dot(z) - (smax + std::log((s.array() - smax).exp().sum()));
  };

  CoreResult r;
  Vector eta = Vector::Zero(k);
  double phi = objective(eta);
  double prev_grad = kInf;
  for (int it = 0; it < 200; ++it) {
    const Vector s = (z_atoms.transpose() * eta) + logw;
    const double smax = s.maxCoeff();
    Vector pi = (s.array() - smax).exp();
    pi /= pi.sum();
    const Vector m = z_atoms * pi;
    const Vector grad = z - m;
    r.iterations = it;
    r.gradient_norm = grad.norm();
    if (r.gradient_norm < LegendreSolver::kGradientTol) break;
    // Newton stopped contracting: round-off floor.
    if (r.gradient_norm < 1e-8 && r.gradient_norm > 0.5 * prev_grad) break;
    prev_grad = r.gradient_norm;

    Matrix cov = Matrix::Zero(k, k);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Vector c = z_atoms.col(j) - m;
      cov.noalias() += pi[j] * c * c.transpose();
    }
    const Vector step = cov.ldlt().solve(grad);
    double t = 1.0;
    Vector trial = eta + step;
    double trial_phi = objective(trial);
    // Predicted gain below the resolution of phi: take the full step.
    const bool unresolved = grad.dot(step) < 1e-13 * (1.0 + std::abs(phi));
    while (!unresolved && !(trial_phi >= phi) && t > 1e-12) {
      t *= 0.5;
      trial = eta + t * step;
      trial_phi = objective(trial);
    }
    if (!unresolved && !(trial_phi >= phi)) {
      // Round-off floor: the objective no longer resolves improvements.
      if (r.gradient_norm < 1e-8) break;
      std::ostringstream os;
      os << "legendre: line search failed (gradient norm " << r.gradient_norm
         << ", last iterate norm " << eta.norm() << ")";
      fail(ErrorKind::Convergence, os.str());
    }
    eta = std::move(trial);
    phi = trial_phi;
    if (eta.norm() > LegendreSolver::kDivergenceNorm) {
      r.value = kInf;
      r.domain = DomainClass::Outside;
      return r;
    }
    if (it == 199) {
      std::ostringstream os;
      os << "legendre: Newton iteration did not converge (gradient norm " << r.gradient_norm
         << ", last iterate norm " << eta.norm() << ")";
      fail(ErrorKind::Convergence, os.str());
    }
  }
  r.value = phi;
  r.domain = DomainClass::Inside;
  r.lambda = eta;
  return r;
}

CoreResult solve_core(const Vector& w, const Matrix& points, const Vector& x,
                      const Hull* precomputed) {
  const Hull hull = precomputed ? *precomputed : affine_hull(w, points);
  const Vector offset = x - hull.mean;
  const Vector z = hull.directions.transpose() * offset;
  const double perp = (offset - hull.directions * z).norm();
  if (perp > LegendreSolver::kDomainTol * std::max(1.0, x.norm())) return {};

  if (hull.directions.cols() == 0) {
    CoreResult r;
    r.value = 0.0;
    r.domain = DomainClass::Inside;
    r.lambda = Vector::Zero(points.rows());
    return r;
  }

  const Matrix z_atoms = hull.directions.transpose() * (points.colwise() - hull.mean);
  const auto face = face_weights(z_atoms, z);
  if (!face) return {};
  for (Eigen::Index j = 0; j < face->size(); ++j) {
    if ((*face)[j] <= 0.0) return solve_on_face(w, points, x, *face);
  }

  CoreResult r = newton(w, z_atoms, z);
  if (r.domain == DomainClass::Inside) r.lambda = hull.directions * r.lambda;
  return r;
}

}  // namespace

double log_mgf(const IncrementDistribution& dist, const AlgebraVector& lambda) {
  double smax = -kInf;
  std::vector<double> s;
  s.reserve(dist.size());
  for (const auto& a : dist.atoms()) {
    s.push_back(lambda.dot(a.vector) + std::log(a.weight));
    smax = std::max(smax, s.back());
  }
  double acc = 0.0;
  for (double v : s) acc += std::exp(v - smax);
  return smax + std::log(acc);
}

AlgebraVector log_mgf_gradient(const IncrementDistribution& dist, const AlgebraVector& lambda) {
  const double lam = log_mgf(dist, lambda);
  AlgebraVector g = AlgebraVector::zero(dist.dim());
  for (const auto& a : dist.atoms()) {
    g = g + (a.weight * std::exp(lambda.dot(a.vector) - lam)) * a.vector;
  }
  return g;
}

LegendreSolver::LegendreSolver(const IncrementDistribution& dist) : d_(dist.dim()) {
  const auto n = static_cast<Eigen::Index>(dist.size());
  weights_.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& a = dist.atoms()[static_cast<std::size_t>(j)];
    weights_[j] = a.weight;
    const Vector c = coordinates(a.vector);
    if (j == 0) points_.resize(c.size(), n);
    points_.col(j) = c;
  }
  const Hull h = affine_hull(weights_, points_);
  mean_ = h.mean;
  directions_ = h.directions;
}

LegendreResult LegendreSolver::operator()(const AlgebraVector& x) const {
  if (x.dim() != d_) fail(ErrorKind::InvalidArgument, "legendre: dimension mismatch");
  const Hull hull{mean_, directions_};
  const CoreResult core = solve_core(weights_, points_, coordinates(x), &hull);
  LegendreResult r;
  r.domain = core.domain;
  r.finite = core.domain != DomainClass::Outside;
  r.value = r.finite ? core.value : kInf;
  r.gradient_norm = core.gradient_norm;
  r.iterations = core.iterations;
  if (core.domain == DomainClass::Inside) r.maximizer = from_coordinates(d_, core.lambda);
  return r;
}

DomainClass LegendreSolver::classify(const AlgebraVector& x) const {
  if (x.dim() != d_) fail(ErrorKind::InvalidArgument, "domain_check: dimension mismatch");
  const Vector c = coordinates(x);
  const Vector offset = c - mean_;
  const Vector z = directions_.transpose() * offset;
  if ((offset - directions_ * z).norm() > kDomainTol * std::max(1.0, c.norm())) {
    return DomainClass::Outside;
  }
  if (directions_.cols() == 0) return DomainClass::Inside;
  const Matrix z_atoms = directions_.transpose() * (points_.colwise() - mean_);
  const auto face = face_weights(z_atoms, z);
  if (!face) return DomainClass::Outside;
  return (face->array() > 0.0).all() ? DomainClass::Inside : DomainClass::Boundary;
}

LegendreResult legendre(const IncrementDistribution& dist, const AlgebraVector& x) {
  return LegendreSolver(dist)(x);
}

DomainClass domain_check(const IncrementDistribution& dist, const AlgebraVector& x) {
  return LegendreSolver(dist).classify(x);
}

double legendre_closed_form_s2(double x1, double x2, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    fail(ErrorKind::InvalidArgument, "legendre_closed_form_s2: alpha and beta must be positive");
  }
  constexpr double tol = 1e-9;
  if (std::abs(beta * x1 + alpha * x2 - alpha * beta) > tol) return kInf;
  if (x1 < -tol || x1 > alpha + tol || x2 < -tol || x2 > beta + tol) return kInf;
  // Vertices: the supremum is the limit evaluated on the face, log 2.
  if (x1 <= tol || x2 <= tol) return std::log(2.0);
  return std::log(beta * x1) * x1 / alpha + std::log(alpha * x2) * x2 / beta -
         std::log(0.5 * alpha * beta);
}

}  // namespace liecramer
