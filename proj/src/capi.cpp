#include "liecramer/liecramer.h"

#include <exception>
#include <limits>
#include <new>
#include <string>

#include "liecramer/bch.hpp"
#include "liecramer/mc.hpp"
#include "liecramer/random.hpp"
#include "liecramer/rate.hpp"
#include "liecramer/stochastic.hpp"
#include "liecramer/walk.hpp"

using namespace liecramer;

struct lc_distribution {
  IncrementDistribution dist;
};

struct lc_walk {
  WalkTrajectory traj;
};

namespace {

thread_local std::string last_error;

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

lc_status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return LC_ERR_INVALID_ARGUMENT;
    case ErrorKind::InvalidDimension: return LC_ERR_INVALID_DIMENSION;
    case ErrorKind::OutOfDomain: return LC_ERR_OUT_OF_DOMAIN;
    case ErrorKind::Singular: return LC_ERR_SINGULAR;
    case ErrorKind::Numeric: return LC_ERR_NUMERIC;
    case ErrorKind::Infeasible: return LC_ERR_INFEASIBLE;
    case ErrorKind::Convergence: return LC_ERR_CONVERGENCE;
  }
  return LC_ERR_INTERNAL;
}

template <class F>
lc_status guard(F&& f) {
  try {
    f();
    last_error.clear();
    return LC_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return LC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return LC_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return LC_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorKind::InvalidArgument, std::string(what) + " is NULL");
}

Matrix read(std::size_t d, const double* p) {
  need(p, "matrix pointer");
  if (d < 2) fail(ErrorKind::InvalidDimension, "dimension must be >= 2");
  const auto n = static_cast<Eigen::Index>(d);
  return Matrix(Eigen::Map<const RowMajor>(p, n, n));
}

void write(const Matrix& m, double* out) {
  need(out, "output pointer");
  Eigen::Map<RowMajor>(out, m.rows(), m.cols()) = m;
}

AlgebraVector read_algebra(std::size_t d, const double* p) { return AlgebraVector(read(d, p)); }
GroupElement read_group(std::size_t d, const double* p) { return GroupElement(read(d, p)); }

void write_cert(const BoundCertificate& c, lc_certificate* out) {
  need(out, "certificate");
  *out = lc_certificate{c.lhs, c.rhs, c.constant, c.pass ? 1 : 0};
}

void write_estimate(const ProbabilityEstimate& e, lc_estimate* out) {
  need(out, "estimate");
  *out = lc_estimate{e.samples, e.hits, e.p_hat, e.lower, e.upper, e.std_error, e.ess,
                     e.tilted ? 1 : 0, e.degenerate ? 1 : 0};
}

lc_domain domain_of(DomainClass c) {
  switch (c) {
    case DomainClass::Inside: return LC_DOMAIN_INSIDE;
    case DomainClass::Boundary: return LC_DOMAIN_BOUNDARY;
    case DomainClass::Outside: return LC_DOMAIN_OUTSIDE;
  }
  return LC_DOMAIN_OUTSIDE;
}

const IncrementDistribution& dist_of(const lc_distribution* d) {
  need(d, "distribution");
  return d->dist;
}

}  // namespace

extern "C" {

const char* lc_last_error(void) { return last_error.c_str(); }

const char* lc_status_string(lc_status s) {
  switch (s) {
    case LC_OK: return "ok";
    case LC_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case LC_ERR_INVALID_DIMENSION: return "invalid-dimension";
    case LC_ERR_OUT_OF_DOMAIN: return "out-of-domain";
    case LC_ERR_SINGULAR: return "singular";
    case LC_ERR_NUMERIC: return "numeric";
    case LC_ERR_INFEASIBLE: return "infeasible";
    case LC_ERR_CONVERGENCE: return "convergence";
    case LC_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* lc_version(void) { return "0.1.0"; }

lc_status lc_distribution_create(size_t d, size_t atoms, const double* weights, const double* matrices,
                                 lc_distribution** out) {
  return guard([&] {
    need(weights, "weights");
    need(matrices, "matrices");
    need(out, "out");
    if (atoms == 0) fail(ErrorKind::InvalidArgument, "distribution needs at least one atom");
    std::vector<Atom> list;
    for (std::size_t i = 0; i < atoms; ++i) list.push_back({weights[i], read_algebra(d, matrices + i * d * d)});
    *out = new lc_distribution{IncrementDistribution(std::move(list))};
  });
}

lc_status lc_distribution_example(double alpha, double beta, lc_distribution** out) {
  return guard([&] {
    need(out, "out");
    *out = new lc_distribution{ExampleModel(alpha, beta).distribution()};
  });
}

void lc_distribution_free(lc_distribution* dist) { delete dist; }

lc_status lc_distribution_dim(const lc_distribution* dist, size_t* d) {
  return guard([&] {
    need(d, "out");
    *d = dist_of(dist).dim();
  });
}

lc_status lc_distribution_size(const lc_distribution* dist, size_t* atoms) {
  return guard([&] {
    need(atoms, "out");
    *atoms = dist_of(dist).size();
  });
}

lc_status lc_distribution_mean(const lc_distribution* dist, double* out) {
  return guard([&] { write(dist_of(dist).mean().matrix(), out); });
}

lc_status lc_distribution_support_bound(const lc_distribution* dist, double* out) {
  return guard([&] {
    need(out, "out");
    *out = dist_of(dist).support_bound();
  });
}

lc_status lc_distribution_kappa(const lc_distribution* dist, double* out) {
  return guard([&] {
    need(out, "out");
    *out = kappa_for(dist_of(dist));
  });
}

lc_status lc_exp(size_t d, const double* x, double* out) {
  return guard([&] { write(exp_matrix(read_algebra(d, x)).matrix(), out); });
}

lc_status lc_log(size_t d, const double* g, double* out) {
  return guard([&] { write(log_matrix(read_group(d, g)).matrix(), out); });
}

lc_status lc_bracket(size_t d, const double* x, const double* y, double* out) {
  return guard([&] { write(bracket(read_algebra(d, x), read_algebra(d, y)).matrix(), out); });
}

lc_status lc_ad_norm(size_t d, const double* x, double* out) {
  return guard([&] {
    need(out, "out");
    *out = ad_operator(read_algebra(d, x)).norm();
  });
}

lc_status lc_distance(size_t d, const double* g, const double* h, double* out) {
  return guard([&] {
    need(out, "out");
    *out = distance_proxy(read_group(d, g), read_group(d, h));
  });
}

lc_status lc_is_group_member(size_t d, const double* m, double tol, int* member, double* row_sum_residual,
                             double* det) {
  return guard([&] {
    need(member, "member");
    const MembershipReport r = is_group_member(read(d, m), tol);
    *member = r.member ? 1 : 0;
    if (row_sum_residual) *row_sum_residual = r.row_sum_residual;
    if (det) *det = r.determinant;
  });
}

lc_status lc_random_algebra_element(size_t d, double radius, uint64_t seed, uint64_t stream, double* out) {
  return guard([&] {
    RandomStream rng(seed, stream);
    write(random_algebra_element(d, radius, rng).matrix(), out);
  });
}

lc_status lc_validate_injectivity(size_t d, size_t samples, uint64_t seed, lc_injectivity_report* out) {
  return guard([&] {
    need(out, "out");
    const InjectivityReport r = validate_injectivity(d, samples, seed);
    *out = lc_injectivity_report{r.samples, r.failures, r.max_log_norm, r.max_round_trip};
  });
}

lc_status lc_bch_log(size_t d, const double* x, const double* y, size_t quad_nodes, double* out) {
  return guard([&] { write(bch_log(read_algebra(d, x), read_algebra(d, y), quad_nodes).matrix(), out); });
}

lc_status lc_c_constant(double ad_norm, double* out) {
  return guard([&] {
    need(out, "out");
    *out = c_constant(ad_norm);
  });
}

lc_status lc_verify_log_product(size_t d, const double* x, const double* y, lc_certificate* out) {
  return guard([&] { write_cert(verify_log_product(read_algebra(d, x), read_algebra(d, y)), out); });
}

lc_status lc_verify_lipschitz(size_t d, const double* x, const double* y, double constant, lc_certificate* out) {
  return guard([&] { write_cert(verify_lipschitz(read_algebra(d, x), read_algebra(d, y), constant), out); });
}

lc_status lc_empirical_lipschitz(size_t d, double radius, size_t pairs, uint64_t seed, double* out) {
  return guard([&] {
    need(out, "out");
    *out = empirical_lipschitz_constant(d, radius, pairs, seed);
  });
}

lc_status lc_validate_bch_radius(size_t d, double radius, size_t samples, uint64_t seed, double* max_contraction,
                                 int* ok) {
  return guard([&] {
    need(max_contraction, "max_contraction");
    need(ok, "ok");
    const RadiusValidation v = validate_bch_radius(d, radius, samples, seed);
    *max_contraction = v.max_contraction;
    *ok = v.ok ? 1 : 0;
  });
}

lc_status lc_walk_simulate(const lc_distribution* dist, size_t n, uint64_t seed, size_t checkpoint_stride,
                           lc_walk** out) {
  return guard([&] {
    need(out, "out");
    *out = new lc_walk{simulate_walk(dist_of(dist), n, seed, checkpoint_stride)};
  });
}

void lc_walk_free(lc_walk* walk) { delete walk; }

lc_status lc_walk_steps(const lc_walk* walk, size_t* n) {
  return guard([&] {
    need(walk, "walk");
    need(n, "out");
    *n = walk->traj.steps();
  });
}

lc_status lc_walk_point(const lc_walk* walk, size_t k, double* out) {
  return guard([&] {
    need(walk, "walk");
    write(walk->traj.point(k).matrix(), out);
  });
}

lc_status lc_walk_atom(const lc_walk* walk, size_t k, size_t* atom) {
  return guard([&] {
    need(walk, "walk");
    need(atom, "out");
    if (k == 0 || k > walk->traj.steps()) fail(ErrorKind::InvalidArgument, "lc_walk_atom: k out of range");
    *atom = walk->traj.atom_index(k);
  });
}

lc_status lc_walk_segment_logs(const lc_walk* walk, size_t m, double* out) {
  return guard([&] {
    need(walk, "walk");
    need(out, "out");
    const PathDiscretization logs = segment_decomposition(walk->traj, m).segment_logs();
    const std::size_t dd = walk->traj.dim() * walk->traj.dim();
    for (std::size_t i = 0; i < logs.size(); ++i) write(logs[i].matrix(), out + i * dd);
  });
}

lc_status lc_walk_replacement(const lc_walk* walk, const lc_distribution* dist, size_t m, lc_replacement* out) {
  return guard([&] {
    need(walk, "walk");
    need(out, "out");
    const ReplacementCertificate c = replacement_deviation(walk->traj, dist_of(dist), m);
    *out = lc_replacement{c.max_deviation, c.bound, c.kappa, c.support_bound, c.pass ? 1 : 0};
  });
}

namespace {

PathDiscretization read_segments(size_t d, size_t m, const double* p) {
  need(p, "segments");
  PathDiscretization out;
  for (std::size_t i = 0; i < m; ++i) out.push_back(read_algebra(d, p + i * d * d));
  return out;
}

}  // namespace

lc_status lc_psi_m(size_t d, size_t m, const double* segments, double* out) {
  return guard([&] { write(psi_m(read_segments(d, m, segments)).matrix(), out); });
}

lc_status lc_psi_m_continuity(size_t d, size_t m, const double* x, const double* y, double r, double constant,
                              lc_certificate* out) {
  return guard([&] {
    write_cert(psi_m_continuity_check(read_segments(d, m, x), read_segments(d, m, y), r, constant), out);
  });
}

lc_status lc_empirical_continuity(size_t d, double r, size_t m, size_t pairs, uint64_t seed, double* out) {
  return guard([&] {
    need(out, "out");
    *out = empirical_continuity_constant(d, r, m, pairs, seed);
  });
}

lc_status lc_legendre(const lc_distribution* dist, const double* x, lc_legendre_result* out, double* lambda) {
  return guard([&] {
    need(out, "out");
    const IncrementDistribution& dd = dist_of(dist);
    const LegendreResult r = legendre(dd, read_algebra(dd.dim(), x));
    *out = lc_legendre_result{r.value, r.finite ? 1 : 0, domain_of(r.domain), r.maximizer ? 1 : 0,
                              r.gradient_norm, r.iterations};
    if (lambda && r.maximizer) write(r.maximizer->matrix(), lambda);
  });
}

lc_status lc_log_mgf(const lc_distribution* dist, const double* lambda, double* out) {
  return guard([&] {
    need(out, "out");
    const IncrementDistribution& dd = dist_of(dist);
    *out = log_mgf(dd, read_algebra(dd.dim(), lambda));
  });
}

lc_status lc_legendre_closed_form_s2(double x1, double x2, double alpha, double beta, double* out) {
  return guard([&] {
    need(out, "out");
    *out = legendre_closed_form_s2(x1, x2, alpha, beta);
  });
}

lc_status lc_discretized_rate(const lc_distribution* dist, const double* g, size_t m, lc_rate_result* out,
                              double* minimizer) {
  return guard([&] {
    need(out, "out");
    const IncrementDistribution& dd = dist_of(dist);
    const DiscretizedRate r = discretized_rate(dd, read_group(dd.dim(), g), m);
    *out = lc_rate_result{r.m, r.value, r.finite ? 1 : 0, r.constraint_residual, r.outer_iterations,
                          r.inner_iterations, r.final_penalty};
    if (minimizer) {
      const std::size_t dsq = dd.dim() * dd.dim();
      for (std::size_t i = 0; i < r.minimizer.size(); ++i) write(r.minimizer[i].matrix(), minimizer + i * dsq);
    }
  });
}

lc_status lc_rate_one_parameter(const lc_distribution* dist, const double* x, size_t subintervals, size_t nodes,
                                double* out) {
  return guard([&] {
    need(out, "out");
    const IncrementDistribution& dd = dist_of(dist);
    *out = rate_along_path(dd, PathSpec::one_parameter(read_algebra(dd.dim(), x)), {subintervals, nodes});
  });
}

lc_status lc_rate_optimal_path_s2(const lc_distribution* dist, double alpha, const double* m, size_t subintervals,
                                  size_t nodes, double* out) {
  return guard([&] {
    need(out, "out");
    *out = rate_along_path(dist_of(dist), optimal_path_s2(alpha, read_group(2, m)), {subintervals, nodes});
  });
}

lc_status lc_closed_form_rate_s2(const double* m, double alpha, double* out) {
  return guard([&] {
    need(out, "out");
    *out = closed_form_rate_s2(read_group(2, m), alpha);
  });
}

lc_status lc_segment_integral_gap_s2(double alpha, const double* m, size_t segments, double* out) {
  return guard([&] {
    need(out, "out");
    *out = segment_integral_gap(optimal_path_s2(alpha, read_group(2, m)), segments);
  });
}

lc_status lc_estimate_probability(const lc_distribution* dist, size_t n, const double* center, double radius,
                                  size_t samples, uint64_t seed, size_t workers, lc_estimate* out) {
  return guard([&] {
    const IncrementDistribution& dd = dist_of(dist);
    const BallEvent ev(read_group(dd.dim(), center), radius);
    write_estimate(estimate_probability(dd, n, ev, samples, seed, workers), out);
  });
}

lc_status lc_tilted_estimate(const lc_distribution* dist, size_t n, const double* center, double radius,
                             size_t samples, const double* lambda, uint64_t seed, size_t workers, lc_estimate* out) {
  return guard([&] {
    const IncrementDistribution& dd = dist_of(dist);
    const BallEvent ev(read_group(dd.dim(), center), radius);
    write_estimate(tilted_estimator(dd, n, ev, samples, read_algebra(dd.dim(), lambda), seed, workers), out);
  });
}

lc_status lc_auto_tilt(const lc_distribution* dist, const double* center, double radius, double* lambda,
                       int* available) {
  return guard([&] {
    need(available, "available");
    const IncrementDistribution& dd = dist_of(dist);
    const BallEvent ev(read_group(dd.dim(), center), radius);
    const auto t = auto_tilt(dd, ev);
    *available = t ? 1 : 0;
    if (t) write(t->matrix(), lambda);
  });
}

}  // extern "C"
