/* C interface to liecramer. Matrices are row-major arrays of d*d doubles.
 * Every function returns an lc_status; on failure lc_last_error() holds a
 * thread-local message. Output pointers are written only on success. */
#ifndef LIECRAMER_H
#define LIECRAMER_H

#include <stddef.h>
#include <stdint.h>

#if defined(LIECRAMER_BUILDING)
#define LC_API __attribute__((visibility("default")))
#else
#define LC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  LC_OK = 0,
  LC_ERR_INVALID_ARGUMENT = 1,
  LC_ERR_INVALID_DIMENSION = 2,
  LC_ERR_OUT_OF_DOMAIN = 3,
  LC_ERR_SINGULAR = 4,
  LC_ERR_NUMERIC = 5,
  LC_ERR_INFEASIBLE = 6,
  LC_ERR_CONVERGENCE = 7,
  LC_ERR_INTERNAL = 8
} lc_status;

typedef enum { LC_DOMAIN_INSIDE = 0, LC_DOMAIN_BOUNDARY = 1, LC_DOMAIN_OUTSIDE = 2 } lc_domain;

typedef enum { LC_TILT_NONE = 0, LC_TILT_FIXED = 1, LC_TILT_AUTO = 2 } lc_tilt_policy;

LC_API const char* lc_last_error(void);
LC_API const char* lc_status_string(lc_status s);
LC_API const char* lc_version(void);

/* ---- increment distributions ---- */
typedef struct lc_distribution lc_distribution;

/* `atoms` matrices of size d*d, stored consecutively. */
LC_API lc_status lc_distribution_create(size_t d, size_t atoms, const double* weights,
                                        const double* matrices, lc_distribution** out);
/* Two-atom model A = [[-alpha, alpha], [0, 0]], B = [[0, 0], [beta, -beta]], p = 1/2. */
LC_API lc_status lc_distribution_example(double alpha, double beta, lc_distribution** out);
LC_API void lc_distribution_free(lc_distribution* dist);
LC_API lc_status lc_distribution_dim(const lc_distribution* dist, size_t* d);
LC_API lc_status lc_distribution_size(const lc_distribution* dist, size_t* atoms);
LC_API lc_status lc_distribution_mean(const lc_distribution* dist, double* out);
LC_API lc_status lc_distribution_support_bound(const lc_distribution* dist, double* out);
/* max(kappa_d, ratio on the support) */
LC_API lc_status lc_distribution_kappa(const lc_distribution* dist, double* out);

/* ---- group and algebra ---- */
LC_API lc_status lc_exp(size_t d, const double* x, double* out);
LC_API lc_status lc_log(size_t d, const double* g, double* out);
LC_API lc_status lc_bracket(size_t d, const double* x, const double* y, double* out);
LC_API lc_status lc_ad_norm(size_t d, const double* x, double* out);
LC_API lc_status lc_distance(size_t d, const double* g, const double* h, double* out);
/* member is 0/1; residual and det may be NULL. Returns LC_OK for non-members. */
LC_API lc_status lc_is_group_member(size_t d, const double* m, double tol, int* member,
                                    double* row_sum_residual, double* det);
LC_API lc_status lc_random_algebra_element(size_t d, double radius, uint64_t seed, uint64_t stream,
                                           double* out);

typedef struct {
  size_t samples;
  size_t failures;
  double max_log_norm;
  double max_round_trip;
} lc_injectivity_report;

LC_API lc_status lc_validate_injectivity(size_t d, size_t samples, uint64_t seed,
                                         lc_injectivity_report* out);

/* ---- BCH estimates ---- */
typedef struct {
  double lhs;
  double rhs;
  double constant;
  int pass;
} lc_certificate;

LC_API lc_status lc_bch_log(size_t d, const double* x, const double* y, size_t quad_nodes, double* out);
LC_API lc_status lc_c_constant(double ad_norm, double* out);
LC_API lc_status lc_verify_log_product(size_t d, const double* x, const double* y, lc_certificate* out);
LC_API lc_status lc_verify_lipschitz(size_t d, const double* x, const double* y, double constant,
                                     lc_certificate* out);
LC_API lc_status lc_empirical_lipschitz(size_t d, double radius, size_t pairs, uint64_t seed,
                                        double* out);
LC_API lc_status lc_validate_bch_radius(size_t d, double radius, size_t samples, uint64_t seed,
                                        double* max_contraction, int* ok);

/* ---- walks ---- */
typedef struct lc_walk lc_walk;

/* checkpoint_stride 0 picks the default storage policy. */
LC_API lc_status lc_walk_simulate(const lc_distribution* dist, size_t n, uint64_t seed,
                                  size_t checkpoint_stride, lc_walk** out);
LC_API void lc_walk_free(lc_walk* walk);
LC_API lc_status lc_walk_steps(const lc_walk* walk, size_t* n);
/* sigma_k^n, k in 0..n */
LC_API lc_status lc_walk_point(const lc_walk* walk, size_t k, double* out);
/* atom index of X_k, k in 1..n */
LC_API lc_status lc_walk_atom(const lc_walk* walk, size_t k, size_t* atom);
/* m segment logarithms, m*d*d doubles */
LC_API lc_status lc_walk_segment_logs(const lc_walk* walk, size_t m, double* out);

typedef struct {
  double max_deviation;
  double bound;
  double kappa;
  double support_bound;
  int pass;
} lc_replacement;

LC_API lc_status lc_walk_replacement(const lc_walk* walk, const lc_distribution* dist, size_t m,
                                     lc_replacement* out);
/* m segments of d*d doubles each */
LC_API lc_status lc_psi_m(size_t d, size_t m, const double* segments, double* out);
LC_API lc_status lc_psi_m_continuity(size_t d, size_t m, const double* x, const double* y, double r,
                                     double constant, lc_certificate* out);
LC_API lc_status lc_empirical_continuity(size_t d, double r, size_t m, size_t pairs, uint64_t seed,
                                         double* out);

/* ---- Legendre transform ---- */
typedef struct {
  double value; /* +inf when not finite */
  int finite;
  lc_domain domain;
  int has_maximizer;
  double gradient_norm;
  int iterations;
} lc_legendre_result;

/* lambda may be NULL; when non-NULL and has_maximizer, receives d*d doubles. */
LC_API lc_status lc_legendre(const lc_distribution* dist, const double* x, lc_legendre_result* out,
                             double* lambda);
LC_API lc_status lc_log_mgf(const lc_distribution* dist, const double* lambda, double* out);
LC_API lc_status lc_legendre_closed_form_s2(double x1, double x2, double alpha, double beta, double* out);

/* ---- rate function ---- */
typedef struct {
  size_t m;
  double value;
  int finite;
  double constraint_residual;
  size_t outer_iterations;
  size_t inner_iterations;
  double final_penalty;
} lc_rate_result;

/* minimizer may be NULL; otherwise receives m*d*d doubles. */
LC_API lc_status lc_discretized_rate(const lc_distribution* dist, const double* g, size_t m,
                                     lc_rate_result* out, double* minimizer);
/* Quadrature along t -> exp(t x). */
LC_API lc_status lc_rate_one_parameter(const lc_distribution* dist, const double* x, size_t subintervals,
                                       size_t nodes, double* out);
/* Quadrature along the closed-form 2x2 path towards M. */
LC_API lc_status lc_rate_optimal_path_s2(const lc_distribution* dist, double alpha, const double* m,
                                         size_t subintervals, size_t nodes, double* out);
LC_API lc_status lc_closed_form_rate_s2(const double* m, double alpha, double* out);
/* max_i |segment log - segment integral| on the closed-form path */
LC_API lc_status lc_segment_integral_gap_s2(double alpha, const double* m, size_t segments, double* out);

/* ---- Monte Carlo ---- */
typedef struct {
  size_t samples;
  size_t hits;
  double p_hat;
  double lower;
  double upper;
  double std_error;
  double ess;
  int tilted;
  int degenerate;
} lc_estimate;

LC_API lc_status lc_estimate_probability(const lc_distribution* dist, size_t n, const double* center,
                                         double radius, size_t samples, uint64_t seed, size_t workers,
                                         lc_estimate* out);
LC_API lc_status lc_tilted_estimate(const lc_distribution* dist, size_t n, const double* center,
                                    double radius, size_t samples, const double* lambda, uint64_t seed,
                                    size_t workers, lc_estimate* out);
/* available = 0 when log(center) is not interior to the domain of Lambda*. */
LC_API lc_status lc_auto_tilt(const lc_distribution* dist, const double* center, double radius,
                              double* lambda, int* available);

#ifdef __cplusplus
}
#endif

#endif
