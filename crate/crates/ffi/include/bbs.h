#ifndef BBS_H
#define BBS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum BbsStatus {
  /**
   * Success.
   */
  BbsStatus_Ok = 0,
  /**
   * A required pointer was null.
   */
  BbsStatus_NullPointer = 1,
  /**
   * Arguments outside the domain (non-positive scale, bad range, ...).
   */
  BbsStatus_InvalidArgument = 2,
  /**
   * A numerical routine failed (non-convergence, singular information).
   */
  BbsStatus_NumericFailure = 3,
  /**
   * An internal panic was caught at the boundary.
   */
  BbsStatus_Panic = 4,
} BbsStatus;

/**
 * Opaque handle to a profile-likelihood fit.
 */
typedef struct BbsFit BbsFit;

/**
 * Opaque handle to a BBS(alpha, beta, delta) model.
 */
typedef struct BbsModel BbsModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent error on this thread, or null when no error
 * has occurred yet. Valid until the next failing call on the same thread;
 * do not free it.
 */
const char *bbs_last_error_message(void);

/**
 * Create a model handle. `alpha > 0`, `beta > 0`, `delta` finite.
 *
 * # Safety
 * `out` must point to writable storage for one pointer.
 */
enum BbsStatus bbs_model_new(double alpha, double beta, double delta, struct BbsModel **out);

/**
 * Release a model handle. Null is a no-op.
 *
 * # Safety
 * `model` must have come from [`bbs_model_new`] and not been freed before.
 */
void bbs_model_free(struct BbsModel *model);

/**
 * Density at `t > 0`.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum BbsStatus bbs_model_pdf(const struct BbsModel *model, double t, double *out);

/**
 * Distribution function at `t > 0`.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum BbsStatus bbs_model_cdf(const struct BbsModel *model, double t, double *out);

/**
 * Survival function at `t > 0`.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum BbsStatus bbs_model_sf(const struct BbsModel *model, double t, double *out);

/**
 * Hazard rate at `t > 0`; fails with `NumericFailure` where the survival
 * function has underflowed.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum BbsStatus bbs_model_hazard(const struct BbsModel *model, double t, double *out);

/**
 * Quantile for `u` in (0, 1).
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum BbsStatus bbs_model_quantile(const struct BbsModel *model, double u, double *out);

/**
 * Mean and variance by omega-weighted quadrature.
 *
 * # Safety
 * `model` must be a live handle; `mean` and `variance` must be writable.
 */
enum BbsStatus bbs_model_moments(const struct BbsModel *model, double *mean, double *variance);

/**
 * Critical points of the density. `locations`/`is_maximum` receive up to
 * `capacity` entries (ascending); `written` gets the total count found.
 * Returns `InvalidArgument` when capacity is too small (3 is always
 * enough: at most two maxima and one interior minimum).
 *
 * # Safety
 * The output arrays must hold at least `capacity` elements.
 */
enum BbsStatus bbs_model_modes(const struct BbsModel *model,
                               double *locations,
                               uint8_t *is_maximum,
                               size_t capacity,
                               size_t *written);

/**
 * Fill `out` with `n` draws using the deterministic stream for `seed`.
 *
 * # Safety
 * `out` must hold at least `n` doubles.
 */
enum BbsStatus bbs_model_sample(const struct BbsModel *model, uint64_t seed, size_t n, double *out);

/**
 * Profile-likelihood fit over the integer delta grid `[delta_lo, delta_hi]`.
 * `events` may be null (all observations are events) or hold 0/1 flags.
 *
 * # Safety
 * `times` (and `events` when non-null) must hold `n` elements; `out` must
 * be writable.
 */
enum BbsStatus bbs_fit_profile(const double *times,
                               const uint8_t *events,
                               size_t n,
                               int32_t delta_lo,
                               int32_t delta_hi,
                               struct BbsFit **out);

/**
 * Release a fit handle. Null is a no-op.
 *
 * # Safety
 * `fit` must have come from [`bbs_fit_profile`] and not been freed before.
 */
void bbs_fit_free(struct BbsFit *fit);

/**
 * Point estimates of the fit.
 *
 * # Safety
 * `fit` must be a live handle; the out-pointers must be writable.
 */
enum BbsStatus bbs_fit_params(const struct BbsFit *fit, double *alpha, double *beta, double *delta);

/**
 * Fit quality: maximized log-likelihood, AIC, BIC.
 *
 * # Safety
 * `fit` must be a live handle; the out-pointers must be writable.
 */
enum BbsStatus bbs_fit_quality(const struct BbsFit *fit, double *loglik, double *aic, double *bic);

/**
 * Standard errors for (alpha, beta) from the inverse observed information;
 * `NumericFailure` when the information matrix was singular. The grid-valued
 * delta carries no standard error.
 *
 * # Safety
 * `fit` must be a live handle; the out-pointers must be writable.
 */
enum BbsStatus bbs_fit_standard_errors(const struct BbsFit *fit, double *se_alpha, double *se_beta);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BBS_H */
