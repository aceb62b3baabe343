/* Exercises the C interface from plain C. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "liecramer/liecramer.h"

static int failures = 0;

#define CHECK(cond)                                               \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: CHECK(%s) failed\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

static double frob(const double* a, const double* b, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return sqrt(s);
}

int main(void) {
  CHECK(strcmp(lc_version(), "0.1.0") == 0);
  CHECK(strcmp(lc_status_string(LC_OK), "ok") == 0 || lc_status_string(LC_OK) != NULL);

  /* exp / log round trip */
  double x[4] = {-0.3, 0.3, 0.2, -0.2};
  double g[4], back[4];
  CHECK(lc_exp(2, x, g) == LC_OK);
  CHECK(lc_log(2, g, back) == LC_OK);
  CHECK(frob(x, back, 4) < 1e-12);
  CHECK(fabs(g[0] + g[1] - 1.0) < 1e-14);

  /* bad input maps to a status and a message */
  double bad[4] = {-0.3, 0.2, 0.2, -0.2};
  CHECK(lc_exp(2, bad, g) == LC_ERR_INVALID_ARGUMENT);
  CHECK(strlen(lc_last_error()) > 0);
  double scalar[1] = {0.0};
  CHECK(lc_exp(1, scalar, g) == LC_ERR_INVALID_DIMENSION);
  double singular[4] = {1.0, 0.0, 1.0, 0.0};
  int member = 1;
  double res = 0.0, det = 1.0;
  CHECK(lc_is_group_member(2, singular, 1e-9, &member, &res, &det) == LC_OK);
  CHECK(member == 0);
  CHECK(fabs(det) < 1e-15);

  double neg[4] = {0.0, 1.0, 1.0, 0.0};
  CHECK(lc_log(2, neg, back) == LC_ERR_OUT_OF_DOMAIN);

  /* distribution and Legendre transform */
  lc_distribution* dist = NULL;
  CHECK(lc_distribution_example(1.0, 1.0, &dist) == LC_OK);
  size_t d = 0, atoms = 0;
  CHECK(lc_distribution_dim(dist, &d) == LC_OK && d == 2);
  CHECK(lc_distribution_size(dist, &atoms) == LC_OK && atoms == 2);
  double mean[4];
  CHECK(lc_distribution_mean(dist, mean) == LC_OK);
  lc_legendre_result lr;
  double lambda[4];
  CHECK(lc_legendre(dist, mean, &lr, lambda) == LC_OK);
  CHECK(lr.finite && fabs(lr.value) < 1e-12 && lr.domain == LC_DOMAIN_INSIDE);
  double a[4] = {-1.0, 1.0, 0.0, 0.0};
  CHECK(lc_legendre(dist, a, &lr, NULL) == LC_OK);
  CHECK(lr.domain == LC_DOMAIN_BOUNDARY && fabs(lr.value - log(2.0)) < 1e-12);
  double cf = 0.0;
  CHECK(lc_legendre_closed_form_s2(0.5, 0.5, 1.0, 1.0, &cf) == LC_OK);
  CHECK(fabs(cf) < 1e-15);

  double weights[2] = {0.5, 0.6};
  double mats[8] = {-1, 1, 0, 0, 0, 0, 1, -1};
  lc_distribution* broken = NULL;
  CHECK(lc_distribution_create(2, 2, weights, mats, &broken) == LC_ERR_INVALID_ARGUMENT);
  CHECK(broken == NULL);

  /* BCH certificates */
  double y[4] = {0.05, -0.05, -0.1, 0.1};
  double small[4] = {-0.1, 0.1, 0.05, -0.05};
  double z[4];
  CHECK(lc_bch_log(2, small, y, 16, z) == LC_OK);
  lc_certificate cert;
  CHECK(lc_verify_log_product(2, small, y, &cert) == LC_OK);
  CHECK(cert.pass && cert.lhs <= cert.rhs);
  CHECK(lc_bch_log(2, x, x, 16, z) == LC_ERR_OUT_OF_DOMAIN);

  /* walk */
  lc_walk* walk = NULL;
  CHECK(lc_walk_simulate(dist, 400, 7, 0, &walk) == LC_OK);
  size_t n = 0;
  CHECK(lc_walk_steps(walk, &n) == LC_OK && n == 400);
  double end[4], segs[16], prod[4];
  CHECK(lc_walk_point(walk, 400, end) == LC_OK);
  CHECK(lc_walk_segment_logs(walk, 4, segs) == LC_OK);
  CHECK(lc_psi_m(2, 4, segs, prod) == LC_OK);
  CHECK(frob(end, prod, 4) < 1e-12);
  lc_replacement rep;
  CHECK(lc_walk_replacement(walk, dist, 8, &rep) == LC_OK);
  CHECK(rep.pass && rep.max_deviation <= rep.bound);
  CHECK(lc_walk_point(walk, 401, end) == LC_ERR_INVALID_ARGUMENT);
  lc_walk_free(walk);

  /* rate */
  lc_rate_result rr;
  double gm[4];
  CHECK(lc_exp(2, mean, gm) == LC_OK);
  CHECK(lc_discretized_rate(dist, gm, 2, &rr, NULL) == LC_OK);
  CHECK(rr.finite && fabs(rr.value) < 1e-9);
  double one = 0.0;
  CHECK(lc_rate_one_parameter(dist, a, 8, 8, &one) == LC_OK);
  CHECK(fabs(one - log(2.0)) < 1e-12);
  double off[4] = {0.7, 0.3, 0.3, 0.7};
  CHECK(lc_closed_form_rate_s2(off, 1.0, &cf) == LC_OK);
  CHECK(isinf(cf));

  /* Monte Carlo */
  lc_estimate est1, est2;
  CHECK(lc_estimate_probability(dist, 20, gm, 0.05, 5000, 3, 1, &est1) == LC_OK);
  CHECK(lc_estimate_probability(dist, 20, gm, 0.05, 5000, 3, 2, &est2) == LC_OK);
  CHECK(est1.hits == est2.hits && est1.p_hat == est2.p_hat);
  CHECK(est1.lower <= est1.p_hat && est1.p_hat <= est1.upper);
  CHECK(lc_estimate_probability(dist, 20, gm, 0.05, 0, 3, 1, &est1) == LC_ERR_INVALID_ARGUMENT);
  int available = 0;
  double tilt[4];
  CHECK(lc_auto_tilt(dist, gm, 0.05, tilt, &available) == LC_OK);
  CHECK(available);

  lc_distribution_free(dist);
  lc_distribution_free(NULL);

  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("capi_test: all checks passed\n");
  return 0;
}
