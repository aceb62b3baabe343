#include "liecramer/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "liecramer/quadrature.hpp"

namespace liecramer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix optimal_s2_matrix(const PathSpec::ClosedFormS2& c, double t) {
  const double scale = -std::expm1(-c.alpha * t) / -std::expm1(-c.alpha);
  const double g1 = c.m12 * scale;
  const double g2 = c.m21 * scale;
  Matrix m(2, 2);
  m << 1.0 - g1, g1, g2, 1.0 - g2;
  return m;
}

AlgebraVector optimal_s2_log_derivative(const PathSpec::ClosedFormS2& c, double t) {
  const double norm = -std::expm1(-c.alpha);
  const double psi = -std::expm1(-c.alpha * t);
  const double dpsi = c.alpha * std::exp(-c.alpha * t);
  const double g1 = c.m12 / norm * psi;
  const double g2 = c.m21 / norm * psi;
  const double d1 = c.m12 / norm * dpsi;
  const double d2 = c.m21 / norm * dpsi;
  const double det = 1.0 - g1 - g2;
  const double a = ((1.0 - g2) * d1 + g1 * d2) / det;
  const double b = ((1.0 - g1) * d2 + g2 * d1) / det;
  Matrix m(2, 2);
  m << -a, a, b, -b;
  return AlgebraVector::project(m);
}

}  // namespace

// -- PathSpec --------------------------------------------------------------

PathSpec PathSpec::optimal_s2(double alpha, double m12, double m21) {
  if (!(alpha > 0.0)) fail(ErrorKind::InvalidArgument, "optimal_s2: alpha must be positive");
  PathSpec p;
  p.dim_ = 2;
  const ClosedFormS2 c{alpha, m12, m21};
  p.closed_form_ = c;
  p.eval_ = [c](double t) { return optimal_s2_matrix(c, t); };
  p.log_derivative_ = [c](double t) { return optimal_s2_log_derivative(c, t); };
  return p;
}

PathSpec PathSpec::one_parameter(const AlgebraVector& x) {
  PathSpec p;
  p.dim_ = x.dim();
  p.eval_ = [x](double t) { return expm(t * x.matrix()); };
  p.log_derivative_ = [x](double) { return x; };
  return p;
}

PathSpec PathSpec::sampled(std::vector<double> times, std::vector<GroupElement> points) {
  if (times.size() != points.size() || times.size() < 2) {
    fail(ErrorKind::InvalidArgument, "PathSpec::sampled: need at least two (t, gamma) samples");
  }
  if (times.front() != 0.0 || times.back() != 1.0) {
    fail(ErrorKind::InvalidArgument, "PathSpec::sampled: times must start at 0 and end at 1");
  }
  const std::size_t d = points.front().dim();
  if ((points.front().matrix() - Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d))).norm() > tolerance::kMembership) {
    fail(ErrorKind::InvalidArgument, "PathSpec::sampled: gamma(0) must be the identity");
  }
  std::vector<AlgebraVector> logs;
  for (std::size_t j = 0; j + 1 < times.size(); ++j) {
    if (!(times[j + 1] > times[j])) {
      fail(ErrorKind::InvalidArgument, "PathSpec::sampled: times must be strictly increasing");
    }
    try {
      logs.push_back(log_matrix(points[j].inverse() * points[j + 1]));
    } catch (const Error& e) {
      std::ostringstream os;
      os << "PathSpec::sampled: samples " << j << " and " << j + 1
         << " are too far apart for a logarithm (" << e.what() << ")";
      fail(ErrorKind::OutOfDomain, os.str());
    }
  }
  PathSpec p;
  p.dim_ = d;
  auto locate = [times](double t) {
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t j = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
    return std::min(j, times.size() - 2);
  };
  p.eval_ = [times, points, logs, locate](double t) {
    const std::size_t j = locate(t);
    const double s = (t - times[j]) / (times[j + 1] - times[j]);
    return Matrix(points[j].matrix() * expm(s * logs[j].matrix()));
  };
  p.log_derivative_ = [times, logs, locate](double t) {
    const std::size_t j = locate(t);
    return (1.0 / (times[j + 1] - times[j])) * logs[j];
  };
  return p;
}

PathSpec PathSpec::from_function(std::size_t d, Evaluator gamma) {
  PathSpec p;
  p.dim_ = d;
  p.eval_ = std::move(gamma);
  return p;
}

GroupElement PathSpec::at(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::InvalidArgument, "PathSpec::at: t outside [0, 1]");
  return GroupElement(eval_(t));
}

std::optional<AlgebraVector> PathSpec::analytic_log_derivative(double t) const {
  if (!log_derivative_) return std::nullopt;
  return log_derivative_(t);
}

AlgebraVector finite_difference_log_derivative(const PathSpec& path, double t, double h) {
  if (!(h > 0.0) || t - h < 0.0 || t + h > 1.0) {
    fail(ErrorKind::InvalidArgument, "logarithmic_derivative: need t - h >= 0 and t + h <= 1");
  }
  const Matrix inv = path.at(t).inverse().matrix();
  const Matrix diff = (path.at(t + h).matrix() - path.at(t - h).matrix()) / (2.0 * h);
  return AlgebraVector::project(inv * diff);
}

AlgebraVector logarithmic_derivative(const PathSpec& path, double t, double h) {
  if (auto a = path.analytic_log_derivative(t)) return *a;
  return finite_difference_log_derivative(path, t, h);
}

namespace {

AlgebraVector log_derivative_at_node(const PathSpec& path, double t) {
  if (auto a = path.analytic_log_derivative(t)) return *a;
  const double h = std::min({1e-5, 0.5 * t, 0.5 * (1.0 - t)});
  return finite_difference_log_derivative(path, t, h);
}

}  // namespace

double rate_along_path(const IncrementDistribution& dist, const PathSpec& path,
                       const PathQuadrature& quad) {
  if (path.dim() != dist.dim()) fail(ErrorKind::InvalidArgument, "rate_along_path: dimension mismatch");
  const LegendreSolver solver(dist);
  const QuadratureRule rule = composite_gauss_legendre(0.0, 1.0, quad.subintervals, quad.nodes);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const LegendreResult r = solver(log_derivative_at_node(path, rule.nodes[i]));
    if (!r.finite) return kInf;
    acc += rule.weights[i] * r.value;
  }
  return acc;
}

// -- discretized minimisation ---------------------------------------------

namespace {

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvec(const Vector& v, Eigen::Index d) { return Eigen::Map<const Matrix>(v.data(), d, d); }

class PenaltyProblem {
public:
  PenaltyProblem(const IncrementDistribution& dist, const GroupElement& g, std::size_t m)
      : solver_(dist),
        d_(dist.dim()),
        m_(m),
        k_(solver_.hull_dim()),
        target_(g.matrix()) {}

  std::size_t variables() const { return m_ * k_; }
  std::size_t hull_dim() const { return k_; }

  struct Point {
    double f = kInf;          // (1/m) sum Lambda*(y_i)
    bool interior = false;    // every y_i in the relative interior
    Vector residual;          // algebra coordinates of log(Psi^-1 g)
    std::vector<Vector> lambdas;
    std::vector<Matrix> exps;
    std::vector<Matrix> xs;
    Matrix psi;
    Matrix z;                 // Psi^-1 g
  };

  AlgebraVector segment(const Vector& u, std::size_t i) const {
    const Vector y = solver_.mean_coordinates() +
                     solver_.hull_directions() * u.segment(static_cast<Eigen::Index>(i * k_), static_cast<Eigen::Index>(k_));
    return from_coordinates(d_, y / static_cast<double>(m_));
  }

  Vector reduce(const AlgebraVector& scaled_segment) const {
    // u_i = V^T (m x_i - mean)
    const Vector y = coordinates(scaled_segment) * static_cast<double>(m_);
    return solver_.hull_directions().transpose() * (y - solver_.mean_coordinates());
  }

  Point evaluate(const Vector& u) const {
    Point p;
    p.f = 0.0;
    p.interior = true;
    const auto n = static_cast<Eigen::Index>(d_);
    p.psi = Matrix::Identity(n, n);
    for (std::size_t i = 0; i < m_; ++i) {
      const AlgebraVector x = segment(u, i);
      const LegendreResult lr = solver_(static_cast<double>(m_) * x);
      if (!lr.finite) {
        p.f = kInf;
        return p;
      }
      p.f += lr.value / static_cast<double>(m_);
      if (lr.domain != DomainClass::Inside) {
        p.interior = false;
        p.lambdas.emplace_back();
      } else {
        p.lambdas.push_back(coordinates(*lr.maximizer));
      }
      p.xs.push_back(x.matrix());
      p.exps.push_back(expm(x.matrix()));
      p.psi = p.psi * p.exps.back();
    }
    try {
      p.z = p.psi.partialPivLu().solve(target_);
      p.residual = coordinates(AlgebraVector::project(logm(p.z)));
    } catch (const Error&) {
      p.f = kInf;
    }
    return p;
  }

  static double lagrangian(const Point& p, const Vector& mult, double rho) {
    if (!std::isfinite(p.f)) return kInf;
    return p.f + mult.dot(p.residual) + rho * p.residual.squaredNorm();
  }

  // Gradient of the augmented Lagrangian; nullopt when a segment sits on the
  // relative boundary, where Lambda* is not differentiable.
  std::optional<Vector> gradient(const Point& p, const Vector& mult, double rho) const {
    if (!p.interior || !std::isfinite(p.f)) return std::nullopt;
    const auto n = static_cast<Eigen::Index>(d_);
    const Matrix& v = solver_.hull_directions();
    const Vector weight = mult + 2.0 * rho * p.residual;

    // L_log(Z, .) as a d^2 x d^2 matrix on column-major vec.
    Matrix log_jac(n * n, n * n);
    for (Eigen::Index c = 0; c < n * n; ++c) {
      Vector e = Vector::Zero(n * n);
      e[c] = 1.0;
      log_jac.col(c) = vec(logm_frechet(p.z, unvec(e, n)));
    }

    std::vector<Matrix> prefix(m_ + 1);
    prefix[0] = Matrix::Identity(n, n);
    for (std::size_t i = 0; i < m_; ++i) prefix[i + 1] = prefix[i] * p.exps[i];
    std::vector<Matrix> suffix(m_ + 1);
    suffix[m_] = Matrix::Identity(n, n);
    for (std::size_t i = m_; i-- > 0;) suffix[i] = p.exps[i] * suffix[i + 1];
    const Matrix psi_inv = p.psi.inverse();

    Vector grad(static_cast<Eigen::Index>(variables()));
    for (std::size_t i = 0; i < m_; ++i) {
      const Vector df = v.transpose() * p.lambdas[i] / static_cast<double>(m_);
      for (std::size_t j = 0; j < k_; ++j) {
        const Matrix dir = from_coordinates(d_, v.col(static_cast<Eigen::Index>(j))).matrix() / static_cast<double>(m_);
        const Matrix dpsi = prefix[i] * expm_frechet(p.xs[i], dir) * suffix[i + 1];
        const Matrix dz = -psi_inv * dpsi * p.z;
        const Matrix dlog = unvec(log_jac * vec(dz), n);
        const Vector dr = coordinates(AlgebraVector::project(dlog));
        grad[static_cast<Eigen::Index>(i * k_ + j)] = df[static_cast<Eigen::Index>(j)] + weight.dot(dr);
      }
    }
    return grad;
  }

  PathDiscretization segments(const Vector& u) const {
    PathDiscretization out;
    for (std::size_t i = 0; i < m_; ++i) out.push_back(segment(u, i));
    return out;
  }

  DomainClass classify_segment(const Vector& u, std::size_t i) const {
    return solver_.classify(static_cast<double>(m_) * segment(u, i));
  }

private:
  LegendreSolver solver_;
  std::size_t d_;
  std::size_t m_;
  std::size_t k_;
  Matrix target_;
};

struct InnerResult {
  std::size_t iterations = 0;
  bool stalled = false;
};

InnerResult minimize_bfgs(const PenaltyProblem& prob, Vector& u, PenaltyProblem::Point& point,
                          const Vector& mult, double rho, const DiscretizedRateOptions& opts) {
  InnerResult res;
  const auto nv = static_cast<Eigen::Index>(prob.variables());
  auto grad = prob.gradient(point, mult, rho);
  if (!grad) {
    res.stalled = true;
    return res;
  }
  Matrix h = Matrix::Identity(nv, nv);
  double value = PenaltyProblem::lagrangian(point, mult, rho);
  bool scaled = false;
  for (std::size_t it = 0; it < opts.max_inner; ++it) {
    res.iterations = it + 1;
    if (grad->lpNorm<Eigen::Infinity>() < opts.gradient_tol) return res;
    Vector dir = -(h * *grad);
    double slope = grad->dot(dir);
    if (!(slope < 0.0)) {
      h.setIdentity();
      dir = -*grad;
      slope = grad->dot(dir);
    }
    const double dn = dir.norm();
    if (dn > 1.0) {
      dir *= 1.0 / dn;
      slope /= dn;
    }

    double t = 1.0;
    bool accepted = false;
    PenaltyProblem::Point trial;
    std::optional<Vector> trial_grad;
    for (int ls = 0; ls < 60; ++ls) {
      const Vector cand = u + t * dir;
      trial = prob.evaluate(cand);
      const double tv = PenaltyProblem::lagrangian(trial, mult, rho);
      if (std::isfinite(tv) && trial.interior && tv <= value + 1e-4 * t * slope) {
        trial_grad = prob.gradient(trial, mult, rho);
        if (trial_grad) {
          accepted = true;
          const Vector s = cand - u;
          const Vector y = *trial_grad - *grad;
          const double sy = s.dot(y);
          if (sy > 1e-14 * s.norm() * y.norm()) {
            if (!scaled) {
              h *= sy / y.squaredNorm();
              scaled = true;
            }
            const double rho_b = 1.0 / sy;
            const Matrix id = Matrix::Identity(nv, nv);
            h = (id - rho_b * s * y.transpose()) * h * (id - rho_b * y * s.transpose()) +
                rho_b * s * s.transpose();
          }
          u = cand;
          point = std::move(trial);
          const double improvement = value - tv;
          value = tv;
          grad = std::move(trial_grad);
          if (improvement <= 1e-16 * (1.0 + std::abs(value)) &&
              grad->lpNorm<Eigen::Infinity>() < 1e3 * opts.gradient_tol) {
            return res;
          }
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (scaled) {
        // Retry once from steepest descent before giving up.
        h.setIdentity();
        scaled = false;
        continue;
      }
      res.stalled = true;
      return res;
    }
  }
  return res;
}

}  // namespace

DiscretizedRate discretized_rate(const IncrementDistribution& dist, const GroupElement& g,
                                 std::size_t m, const DiscretizedRateOptions& opts) {
  if (m == 0) fail(ErrorKind::InvalidArgument, "discretized_rate: m must be positive");
  if (g.dim() != dist.dim()) fail(ErrorKind::InvalidArgument, "discretized_rate: dimension mismatch");
  if (opts.penalties.empty()) fail(ErrorKind::InvalidArgument, "discretized_rate: empty penalty schedule");
  const PenaltyProblem prob(dist, g, m);
  const std::size_t k = prob.hull_dim();
  DiscretizedRate out;
  out.m = m;
  std::ostringstream diag;

  Vector u = Vector::Zero(static_cast<Eigen::Index>(m * k));
  if (opts.seed) {
    if (opts.seed->size() != m) fail(ErrorKind::InvalidArgument, "discretized_rate: seed has wrong length");
    for (std::size_t i = 0; i < m; ++i) {
      u.segment(static_cast<Eigen::Index>(i * k), static_cast<Eigen::Index>(k)) = prob.reduce((*opts.seed)[i]);
    }
    diag << "init=seed;";
  } else {
    try {
      const AlgebraVector l = log_matrix(g);
      const Vector ui = prob.reduce((1.0 / static_cast<double>(m)) * l);
      for (std::size_t i = 0; i < m; ++i) u.segment(static_cast<Eigen::Index>(i * k), static_cast<Eigen::Index>(k)) = ui;
      diag << "init=log(g)/m;";
    } catch (const Error&) {
      diag << "init=mean (log(g) undefined);";
    }
  }
  // Pull the start into the relative interior of the domain of Lambda*.
  if (k > 0) {
    for (int shrink = 0; shrink < 200; ++shrink) {
      bool inside = true;
      for (std::size_t i = 0; i < m && inside; ++i) inside = prob.classify_segment(u, i) == DomainClass::Inside;
      if (inside) break;
      u *= 0.9;
      if (shrink == 199) u.setZero();
    }
  }

  PenaltyProblem::Point point = prob.evaluate(u);
  Vector mult = Vector::Zero(static_cast<Eigen::Index>(g.dim() * g.dim() - g.dim()));
  if (!std::isfinite(point.f)) {
    out.value = kInf;
    out.finite = false;
    out.diagnostics = diag.str() + " start point has infinite objective";
    return out;
  }

  double rho = opts.penalties.front();
  for (std::size_t outer = 0; outer < opts.max_outer; ++outer) {
    rho = opts.penalties[std::min(outer, opts.penalties.size() - 1)];
    const InnerResult inner = minimize_bfgs(prob, u, point, mult, rho, opts);
    out.inner_iterations += inner.iterations;
    out.outer_iterations = outer + 1;
    const double res = point.residual.norm();
    if (inner.stalled) diag << " stall@outer" << outer << ";";
    if (res < opts.residual_tol) break;
    if (k == 0) break;
    mult += 2.0 * rho * point.residual;
  }
  out.final_penalty = rho;
  out.constraint_residual = point.residual.norm();
  out.minimizer = prob.segments(u);
  if (out.constraint_residual > opts.infeasible_residual) {
    out.value = kInf;
    out.finite = false;
    diag << " infeasible: residual " << out.constraint_residual << " at objective " << point.f;
  } else {
    out.value = point.f;
    out.finite = true;
  }
  out.diagnostics = diag.str();
  return out;
}

PathSpec optimal_path_s2(double alpha, const GroupElement& m) {
  if (!(alpha > 0.0)) fail(ErrorKind::InvalidArgument, "optimal_path_s2: alpha must be positive");
  if (m.dim() != 2) fail(ErrorKind::InvalidArgument, "optimal_path_s2: endpoint must be 2x2");
  const double m12 = m.matrix()(0, 1);
  const double m21 = m.matrix()(1, 0);
  const double target = -std::expm1(-alpha);
  if (std::abs(m12 + m21 - target) > 1e-9) {
    std::ostringstream os;
    os << "optimal_path_s2: endpoint violates M12 + M21 = 1 - e^-alpha (residual " << (m12 + m21 - target) << ")";
    fail(ErrorKind::Infeasible, os.str());
  }
  return PathSpec::optimal_s2(alpha, m12, m21);
}

double closed_form_rate_s2(const GroupElement& m, double alpha) {
  if (!(alpha > 0.0)) fail(ErrorKind::InvalidArgument, "closed_form_rate_s2: alpha must be positive");
  if (m.dim() != 2) fail(ErrorKind::InvalidArgument, "closed_form_rate_s2: endpoint must be 2x2");
  const double m12 = m.matrix()(0, 1);
  const double m21 = m.matrix()(1, 0);
  const double norm = -std::expm1(-alpha);
  if (std::abs(m12 + m21 - norm) > 1e-9) return kInf;
  if (m12 < 0.0 || m21 < 0.0) return kInf;
  auto term = [&](double x) { return x > 0.0 ? alpha * alpha * x * std::log(alpha * x / norm) : 0.0; };
  return term(m12) + term(m21) + (1.0 - alpha) * std::exp(-alpha) - std::log(0.5 * alpha * alpha) - 1.0;
}

RateReport rate_report(const IncrementDistribution& dist, const GroupElement& g,
                       const std::vector<std::size_t>& ms, const std::optional<PathSpec>& path,
                       std::optional<double> closed_form_alpha, const DiscretizedRateOptions& opts) {
  RateReport r;
  for (std::size_t m : ms) r.discretized.push_back(discretized_rate(dist, g, m, opts));
  if (path) r.quadrature = rate_along_path(dist, *path);
  if (closed_form_alpha) r.closed_form = closed_form_rate_s2(g, *closed_form_alpha);
  if (r.quadrature && r.closed_form && std::isfinite(*r.quadrature) && std::isfinite(*r.closed_form)) {
    const double gap = *r.closed_form - *r.quadrature;
    if (std::abs(gap) > 1e-6) {
      std::ostringstream os;
      os.precision(17);
      os << "closed-form expression differs from the path quadrature by " << gap;
      r.findings.push_back(os.str());
    }
  }
  return r;
}

JensenCheck jensen_check(const IncrementDistribution& dist, const PathSpec& path, std::size_t m,
                         const PathQuadrature& quad) {
  if (m == 0) fail(ErrorKind::InvalidArgument, "jensen_check: m must be positive");
  const LegendreSolver solver(dist);
  JensenCheck j;
  const std::size_t per = std::max<std::size_t>(1, quad.subintervals / m);
  for (std::size_t i = 0; i < m; ++i) {
    const double a = static_cast<double>(i) / static_cast<double>(m);
    const double b = static_cast<double>(i + 1) / static_cast<double>(m);
    const QuadratureRule rule = composite_gauss_legendre(a, b, per, quad.nodes);
    AlgebraVector acc = AlgebraVector::zero(path.dim());
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      acc = acc + rule.weights[q] * log_derivative_at_node(path, rule.nodes[q]);
    }
    const LegendreResult lr = solver(static_cast<double>(m) * acc);
    j.discrete += lr.finite ? lr.value / static_cast<double>(m) : kInf;
  }
  j.integral = rate_along_path(dist, path, quad);
  return j;
}

double segment_integral_gap(const PathSpec& path, std::size_t m, std::size_t nodes_per_segment) {
  if (m == 0) fail(ErrorKind::InvalidArgument, "segment_integral_gap: m must be positive");
  double gap = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double a = static_cast<double>(i) / static_cast<double>(m);
    const double b = static_cast<double>(i + 1) / static_cast<double>(m);
    const AlgebraVector seg_log = log_matrix(path.at(a).inverse() * path.at(b));
    const QuadratureRule rule = composite_gauss_legendre(a, b, 1, nodes_per_segment);
    AlgebraVector integral = AlgebraVector::zero(path.dim());
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      integral = integral + rule.weights[q] * log_derivative_at_node(path, rule.nodes[q]);
    }
    gap = std::max(gap, (seg_log - integral).norm());
  }
  return gap;
}

}  // namespace liecramer
