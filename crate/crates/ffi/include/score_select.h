#ifndef SCORE_SELECT_H
#define SCORE_SELECT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes.
 */
typedef enum SsStatus {
  SS_STATUS_OK = 0,
  SS_STATUS_NULL_POINTER = 1,
  SS_STATUS_INVALID_ARGUMENT = 2,
  SS_STATUS_DIMENSION_MISMATCH = 3,
  SS_STATUS_OUT_OF_SUPPORT = 4,
  SS_STATUS_IMPROPER_PRIOR = 5,
  SS_STATUS_RANK_DEFICIENT = 6,
  SS_STATUS_NON_SPD_PRIOR = 7,
  SS_STATUS_INSUFFICIENT_BURN_IN = 8,
  SS_STATUS_NOT_APPLICABLE = 9,
  SS_STATUS_INTERNAL = 10,
} SsStatus;

/*
 One-parameter conjugate family (Normal, Gamma or Pareto).
 */
typedef struct SsFamily SsFamily;

/*
 Gaussian linear model with known noise variance and its prior.
 */
typedef struct SsLinearModel SsLinearModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Linear model `y ~ N(X theta, sigma2 I)`. `design` is `n x p`, row-major.

 With `prior_mean` and `prior_cov` (`p` and `p x p` row-major) the prior is
 `N(prior_mean, prior_cov)`. With both null the prior is flat (improper).

 # Safety
 Pointers must be valid for the stated lengths; `out` must be writable.
 */
enum SsStatus ss_linear_model_new(const double *design,
                                  size_t n,
                                  size_t p,
                                  double sigma2,
                                  const double *prior_mean,
                                  const double *prior_cov,
                                  struct SsLinearModel **out);

/*
 Linear model with the isotropic prior `N(0, c * sigma2 * I)`.

 # Safety
 `design` must hold `n * p` values; `out` must be writable.
 */
enum SsStatus ss_linear_model_new_isotropic(const double *design,
                                            size_t n,
                                            size_t p,
                                            double sigma2,
                                            double c,
                                            struct SsLinearModel **out);

/*
 # Safety
 `model` must be null or a handle from `ss_linear_model_new*` not yet freed.
 */
void ss_linear_model_free(struct SsLinearModel *model);

/*
 Multivariate Hyvarinen score of the marginal at `y` (lower is better).

 # Safety
 `model` must be a live handle; `y` must hold `n` values; `out` writable.
 */
enum SsStatus ss_linear_model_score(const struct SsLinearModel *model,
                                    const double *y,
                                    size_t n,
                                    double *out);

/*
 Log marginal likelihood. Fails with `ImproperPrior` for a flat prior.

 # Safety
 As for [`ss_linear_model_score`].
 */
enum SsStatus ss_linear_model_log_marginal(const struct SsLinearModel *model,
                                           const double *y,
                                           size_t n,
                                           double *out);

/*
 Prequential Hyvarinen score; a flat prior starts after `p` observations.

 # Safety
 As for [`ss_linear_model_score`].
 */
enum SsStatus ss_linear_model_prequential_score(const struct SsLinearModel *model,
                                                const double *y,
                                                size_t n,
                                                double *out);

/*
 Hyvarinen score of `N(mean, precision^-1)` at `x`, all of dimension `d`.
 `precision` is `d x d`, row-major, and may be singular.

 # Safety
 Pointers must be valid for the stated lengths; `out` must be writable.
 */
enum SsStatus ss_hyvarinen_gaussian(const double *mean,
                                    const double *precision,
                                    const double *x,
                                    size_t d,
                                    double *out);

/*
 Normal likelihood with known variance `sigma2`, prior `N(prior_mean, prior_var)`.

 # Safety
 `out` must be writable.
 */
enum SsStatus ss_family_new_normal(double sigma2,
                                   double prior_mean,
                                   double prior_var,
                                   struct SsFamily **out);

/*
 Gamma likelihood with known shape `alpha`, `Gamma(a, b)` prior on the rate.

 # Safety
 `out` must be writable.
 */
enum SsStatus ss_family_new_gamma(double alpha, double a, double b, struct SsFamily **out);

/*
 Pareto likelihood with known `x_min`, `Gamma(a, b)` prior on the shape.

 # Safety
 `out` must be writable.
 */
enum SsStatus ss_family_new_pareto(double x_min, double a, double b, struct SsFamily **out);

/*
 # Safety
 `family` must be null or a handle from `ss_family_new_*` not yet freed.
 */
void ss_family_free(struct SsFamily *family);

/*
 Prequential Hyvarinen score of the data in the given order. Fails with
 `OutOfSupport` if any point lies outside the family's support.

 # Safety
 `family` must be a live handle; `data` must hold `n` values; `out` writable.
 */
enum SsStatus ss_family_prequential_hyvarinen(const struct SsFamily *family,
                                              const double *data,
                                              size_t n,
                                              double *out);

/*
 Log marginal likelihood of the data.

 # Safety
 As for [`ss_family_prequential_hyvarinen`].
 */
enum SsStatus ss_family_log_marginal(const struct SsFamily *family,
                                     const double *data,
                                     size_t n,
                                     double *out);

/*
 Message of the last failure on this thread, or null. The pointer stays
 valid until the next call into this library on the same thread.
 */
const char *ss_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *ss_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCORE_SELECT_H */
