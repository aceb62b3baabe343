#include "liecramer/lie.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "liecramer/random.hpp"

namespace liecramer {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::OutOfDomain: return "out-of-domain";
    case ErrorKind::Singular: return "singular-matrix";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Convergence: return "convergence";
  }
  return "unknown";
}

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    fail(ErrorKind::InvalidArgument, os.str());
  }
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) fail(ErrorKind::Numeric, std::string(what) + ": non-finite entries");
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    fail(ErrorKind::InvalidArgument, os.str());
  }
}

// Pade [6/6] coefficients c_k = (12-k)! 6! / (12! k! (6-k)!).
constexpr std::array<double, 7> kPade6 = {
    1.0, 1.0 / 2.0, 5.0 / 44.0, 1.0 / 66.0, 1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0};

Matrix inverse_or_fail(const Matrix& m, const char* what) {
  Eigen::PartialPivLU<Matrix> lu(m);
  if (std::abs(lu.determinant()) <= tolerance::kSingularity) {
    fail(ErrorKind::Singular, std::string(what) + ": matrix is singular");
  }
  return lu.inverse();
}

// Denman-Beavers iteration for the principal square root.
Matrix sqrtm_db(const Matrix& a) {
  const auto n = a.rows();
  Matrix y = a;
  Matrix z = Matrix::Identity(n, n);
  for (int it = 0; it < 100; ++it) {
    const Matrix yi = inverse_or_fail(y, "sqrtm");
    const Matrix zi = inverse_or_fail(z, "sqrtm");
    Matrix y_next = 0.5 * (y + zi);
    z = 0.5 * (z + yi);
    const double change = (y_next - y).norm();
    y = std::move(y_next);
    if (change <= 1e-15 * y.norm()) return y;
  }
  fail(ErrorKind::Convergence, "sqrtm: Denman-Beavers iteration did not converge");
}

Matrix block_upper(const Matrix& a, const Matrix& e) {
  const auto n = a.rows();
  Matrix b = Matrix::Zero(2 * n, 2 * n);
  b.topLeftCorner(n, n) = a;
  b.bottomRightCorner(n, n) = a;
  b.topRightCorner(n, n) = e;
  return b;
}

}  // namespace

// -- AlgebraVector ---------------------------------------------------------

AlgebraVector::AlgebraVector(Matrix entries) : m_(std::move(entries)) {
  require_square(m_, "AlgebraVector");
  require_finite(m_, "AlgebraVector");
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    const double residual = m_.row(i).sum();
    if (std::abs(residual) > tolerance::kMembership) {
      std::ostringstream os;
      os << "AlgebraVector: row-sum-zero constraint violated on row " << i
         << " (residual " << residual << ")";
      fail(ErrorKind::InvalidArgument, os.str());
    }
  }
}

AlgebraVector AlgebraVector::zero(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return AlgebraVector(Matrix::Zero(n, n), Unchecked{});
}

AlgebraVector AlgebraVector::project(const Matrix& m) {
  require_square(m, "AlgebraVector::project");
  require_finite(m, "AlgebraVector::project");
  Matrix p = m;
  const Vector means = m.rowwise().mean();
  p.colwise() -= means;
  return AlgebraVector(std::move(p), Unchecked{});
}

double AlgebraVector::dot(const AlgebraVector& o) const {
  require_same_dim(dim(), o.dim(), "AlgebraVector::dot");
  return m_.cwiseProduct(o.m_).sum();
}

AlgebraVector AlgebraVector::operator+(const AlgebraVector& o) const {
  require_same_dim(dim(), o.dim(), "AlgebraVector::+");
  return AlgebraVector(m_ + o.m_, Unchecked{});
}

AlgebraVector AlgebraVector::operator-(const AlgebraVector& o) const {
  require_same_dim(dim(), o.dim(), "AlgebraVector::-");
  return AlgebraVector(m_ - o.m_, Unchecked{});
}

AlgebraVector AlgebraVector::operator-() const { return AlgebraVector(-m_, Unchecked{}); }

AlgebraVector AlgebraVector::operator*(double s) const { return AlgebraVector(m_ * s, Unchecked{}); }

// -- GroupElement ----------------------------------------------------------

GroupElement::GroupElement(Matrix entries) : m_(std::move(entries)) {
  require_square(m_, "GroupElement");
  require_finite(m_, "GroupElement");
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    const double residual = m_.row(i).sum() - 1.0;
    if (std::abs(residual) > tolerance::kMembership) {
      std::ostringstream os;
      os << "GroupElement: unit-row-sum constraint violated on row " << i
         << " (residual " << residual << ")";
      fail(ErrorKind::InvalidArgument, os.str());
    }
  }
  const double det = m_.determinant();
  if (std::abs(det) <= tolerance::kSingularity) {
    std::ostringstream os;
    os << "GroupElement: invertibility constraint violated (|det| = " << std::abs(det) << ")";
    fail(ErrorKind::Singular, os.str());
  }
}

GroupElement GroupElement::identity(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return GroupElement(Matrix::Identity(n, n), Unchecked{});
}

GroupElement GroupElement::operator*(const GroupElement& o) const {
  require_same_dim(dim(), o.dim(), "GroupElement::*");
  return GroupElement(m_ * o.m_, Unchecked{});
}

GroupElement GroupElement::inverse() const {
  return GroupElement(inverse_or_fail(m_, "GroupElement::inverse"), Unchecked{});
}

// -- LinearOperator --------------------------------------------------------

LinearOperator LinearOperator::identity(std::size_t algebra_dim) {
  const auto n = static_cast<Eigen::Index>(algebra_dim);
  return LinearOperator(Matrix::Identity(n, n));
}

double LinearOperator::norm() const {
  const auto n = rep_.rows();
  if (n == 0) return 0.0;
  const Matrix ata = rep_.transpose() * rep_;
  // Fixed start vector with incommensurate entries so it is not accidentally
  // orthogonal to the dominant singular direction.
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 0.6180339887498949 * std::sin(1.0 + 7.0 * static_cast<double>(i));
  v.normalize();
  double sigma2 = 0.0;
  bool converged = false;
  for (int it = 0; it < 30; ++it) {
    Vector w = ata * v;
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    const double next = v.dot(w);
    v = w / wn;
    if (std::abs(next - sigma2) <= 1e-12 * std::max(1.0, std::abs(next))) {
      converged = true;
      break;
    }
    sigma2 = next;
  }
  if (!converged) {
    // clustered top singular values
    Eigen::SelfAdjointEigenSolver<Matrix> es(ata, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues()(n - 1)));
  }
  return std::sqrt(std::max(0.0, (rep_ * v).squaredNorm()));
}

AlgebraVector LinearOperator::apply(const AlgebraVector& x) const {
  const Vector c = coordinates(x);
  require_same_dim(static_cast<std::size_t>(c.size()), size(), "LinearOperator::apply");
  return from_coordinates(x.dim(), rep_ * c);
}

// -- dense matrix functions ------------------------------------------------

Matrix expm(const Matrix& a) {
  require_square(a, "expm");
  require_finite(a, "expm");
  const auto n = a.rows();
  const double norm = a.norm();
  int squarings = 0;
  if (norm >= 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5))) + 1;
  const Matrix s = a / std::ldexp(1.0, squarings);

  Matrix power = Matrix::Identity(n, n);
  Matrix num = Matrix::Identity(n, n);
  Matrix den = Matrix::Identity(n, n);
  for (std::size_t k = 1; k < kPade6.size(); ++k) {
    power = power * s;
    num += kPade6[k] * power;
    den += ((k % 2 == 0) ? 1.0 : -1.0) * kPade6[k] * power;
  }
  Matrix r = den.partialPivLu().solve(num);
  for (int i = 0; i < squarings; ++i) r = r * r;
  require_finite(r, "expm");
  return r;
}

Matrix logm(const Matrix& a) {
  require_square(a, "logm");
  require_finite(a, "logm");
  const auto n = a.rows();
  const Matrix id = Matrix::Identity(n, n);

  if ((a - id).norm() >= 0.25) {
    Eigen::EigenSolver<Matrix> es(a, false);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto lambda = es.eigenvalues()[i];
      const double scale = std::max(1.0, std::abs(lambda));
      if (std::abs(lambda.imag()) <= 1e-12 * scale && lambda.real() <= 1e-14 * scale) {
        std::ostringstream os;
        os << "logm: eigenvalue " << lambda.real() << " on the closed negative real axis;"
           << " no real principal logarithm";
        fail(ErrorKind::OutOfDomain, os.str());
      }
    }
  }

  Matrix x = a;
  int roots = 0;
  while ((x - id).norm() >= 0.25) {
    if (roots == 64) {
      fail(ErrorKind::OutOfDomain, "logm: square-root phase failed to reach the series region");
    }
    x = sqrtm_db(x);
    ++roots;
  }

  // Mercator series with geometric tail bound q^(K+1) / ((K+1)(1-q)).
  const Matrix e = x - id;
  const double q = e.norm();
  Matrix sum = Matrix::Zero(n, n);
  Matrix power = id;
  for (int k = 1; k <= 400; ++k) {
    power = power * e;
    sum += ((k % 2 == 1) ? 1.0 : -1.0) / static_cast<double>(k) * power;
    const double tail = std::pow(q, k + 1) / ((k + 1) * (1.0 - q));
    if (tail < 1e-18) break;
  }
  return std::ldexp(1.0, roots) * sum;
}

Matrix expm_frechet(const Matrix& a, const Matrix& e) {
  require_square(a, "expm_frechet");
  const double en = e.norm();
  if (en == 0.0) return Matrix::Zero(a.rows(), a.cols());
  const double scale = 0.1 / en;
  const Matrix f = expm(block_upper(a, e * scale));
  return f.topRightCorner(a.rows(), a.cols()) / scale;
}

Matrix logm_frechet(const Matrix& a, const Matrix& e) {
  require_square(a, "logm_frechet");
  const double en = e.norm();
  if (en == 0.0) return Matrix::Zero(a.rows(), a.cols());
  const double scale = 0.01 / en;
  const Matrix f = logm(block_upper(a, e * scale));
  return f.topRightCorner(a.rows(), a.cols()) / scale;
}

// -- Lie primitives --------------------------------------------------------

std::vector<AlgebraVector> algebra_basis(std::size_t d) {
  if (d < 2) {
    fail(ErrorKind::InvalidDimension, "algebra_basis: dimension must be >= 2, got " + std::to_string(d));
  }
  const auto n = static_cast<Eigen::Index>(d);
  std::vector<Matrix> ortho;
  ortho.reserve(d * d - d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      Matrix v = Matrix::Zero(n, n);
      v(i, j) = 1.0;
      v(i, i) = -1.0;
      // Two Gram-Schmidt passes for orthogonality to working precision.
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : ortho) v -= b.cwiseProduct(v).sum() * b;
      }
      v /= v.norm();
      ortho.push_back(std::move(v));
    }
  }
  std::vector<AlgebraVector> basis;
  basis.reserve(ortho.size());
  for (auto& m : ortho) basis.push_back(AlgebraVector::project(m));
  return basis;
}

namespace {

// Basis cache keyed on dimension; the basis is immutable once built.
const std::vector<AlgebraVector>& cached_basis(std::size_t d) {
  thread_local std::vector<std::vector<AlgebraVector>> cache;
  if (cache.size() <= d) cache.resize(d + 1);
  if (cache[d].empty()) cache[d] = algebra_basis(d);
  return cache[d];
}

}  // namespace

Vector coordinates(const AlgebraVector& x) {
  const auto& basis = cached_basis(x.dim());
  Vector c(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) c[static_cast<Eigen::Index>(k)] = basis[k].dot(x);
  return c;
}

AlgebraVector from_coordinates(std::size_t d, const Vector& coords) {
  const auto& basis = cached_basis(d);
  require_same_dim(static_cast<std::size_t>(coords.size()), basis.size(), "from_coordinates");
  const auto n = static_cast<Eigen::Index>(d);
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < basis.size(); ++k) m += coords[static_cast<Eigen::Index>(k)] * basis[k].matrix();
  return AlgebraVector::project(m);
}

GroupElement exp_matrix(const AlgebraVector& x) {
  return GroupElement(expm(x.matrix()), GroupElement::Unchecked{});
}

AlgebraVector log_matrix(const GroupElement& g) {
  return AlgebraVector::project(logm(g.matrix()));
}

bool in_injectivity_ball(const GroupElement& g, InjectivityRadius r) {
  const auto n = static_cast<Eigen::Index>(g.dim());
  return (g.matrix() - Matrix::Identity(n, n)).norm() <= r.epsilon;
}

AlgebraVector bracket(const AlgebraVector& x, const AlgebraVector& y) {
  require_same_dim(x.dim(), y.dim(), "bracket");
  return AlgebraVector::project(x.matrix() * y.matrix() - y.matrix() * x.matrix());
}

LinearOperator ad_operator(const AlgebraVector& x) {
  const auto& basis = cached_basis(x.dim());
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Matrix rep(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const AlgebraVector col = bracket(x, basis[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < dim; ++i) rep(i, j) = basis[static_cast<std::size_t>(i)].dot(col);
  }
  return LinearOperator(std::move(rep));
}

AlgebraVector conjugate(const GroupElement& g, const AlgebraVector& x) {
  require_same_dim(g.dim(), x.dim(), "conjugate");
  const Matrix gi = inverse_or_fail(g.matrix(), "conjugate");
  return AlgebraVector::project(g.matrix() * x.matrix() * gi);
}

double distance_proxy(const GroupElement& g, const GroupElement& h) {
  require_same_dim(g.dim(), h.dim(), "distance_proxy");
  return log_matrix(g.inverse() * h).norm();
}

double ad_norm_ratio(std::size_t d, std::size_t samples, unsigned long long seed) {
  double best = 0.0;
  for (const auto& b : cached_basis(d)) best = std::max(best, ad_operator(b).norm() / b.norm());
  RandomStream rng(seed, 0x61646e6f726dULL);
  for (std::size_t s = 0; s < samples; ++s) {
    const AlgebraVector x = random_algebra_direction(d, 1.0, rng);
    best = std::max(best, ad_operator(x).norm());
  }
  return best;
}

InjectivityReport validate_injectivity(std::size_t d, std::size_t samples,
                                       unsigned long long seed, InjectivityRadius r) {
  InjectivityReport report;
  report.samples = samples;
  RandomStream rng(seed, 0x696e6a656374ULL);
  const auto n = static_cast<Eigen::Index>(d);
  for (std::size_t s = 0; s < samples; ++s) {
    const AlgebraVector e = random_algebra_element(d, r.epsilon, rng);
    const GroupElement g(Matrix::Identity(n, n) + e.matrix());
    const AlgebraVector l = log_matrix(g);
    const double round_trip = (exp_matrix(l).matrix() - g.matrix()).norm();
    report.max_log_norm = std::max(report.max_log_norm, l.norm());
    report.max_round_trip = std::max(report.max_round_trip, round_trip);
    if (l.norm() > r.radius || round_trip > 1e-10) ++report.failures;
  }
  return report;
}

}  // namespace liecramer
