#ifndef FOUNTAIN_SHIFT_H
#define FOUNTAIN_SHIFT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define FSH_OK 0

#define FSH_ERR_NULL_POINTER 1

#define FSH_ERR_INVALID_ARGUMENT 2

#define FSH_ERR_CONFIG 3

#define FSH_ERR_NUMERICAL 4

#define FSH_ERR_STATISTICS 5

#define FSH_ERR_FIT 6

#define FSH_ERR_IO 7

#define FSH_ERR_PANIC 8

#define FSH_FEED_BOTH_BALANCED 0

#define FSH_FEED_SINGLE_PHI0 1

#define FSH_FEED_SINGLE_PI 2

/**
 * Opaque run configuration.
 */
typedef struct FshConfig FshConfig;

typedef struct FshLensingResult {
  double delta_p_term1;
  double delta_p_term2;
  double fringe_amplitude;
  double shift_term1;
  double shift_term2;
  double shift_rel;
  double quadrature_error;
  uint32_t nodes;
} FshLensingResult;

typedef struct FshDcpResult {
  double delta_p;
  double stat_err;
  double shift_rel;
  double shift_stat_err;
  double detected_fraction;
  double centroid_x;
  double centroid_y;
  uint64_t samples;
} FshDcpResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *fsh_version(void);

/**
 * Message of the last failed call on this thread; empty after a success. Valid until the
 * next call on the same thread.
 */
const char *fsh_last_error_message(void);

/**
 * New configuration with the reference defaults. Never returns NULL.
 */
struct FshConfig *fsh_config_new(void);

/**
 * Loads a `key = value` configuration file into a new handle.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out_cfg` a valid pointer.
 */
int32_t fsh_config_load(const char *path, struct FshConfig **out_cfg);

/**
 * # Safety
 * `cfg` must come from this library and not be used afterwards. NULL is ignored.
 */
void fsh_config_free(struct FshConfig *cfg);

/**
 * Sets one key using the configuration file syntax, e.g. `("w0_mm", "1.2")`.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
int32_t fsh_config_set(struct FshConfig *cfg, const char *key, const char *value);

/**
 * Copies the value of `key` into `buf` (NUL-terminated). If `buf_len` is too small the
 * call fails with `FSH_ERR_INVALID_ARGUMENT` and `*needed` holds the required size.
 *
 * # Safety
 * `buf` must hold `buf_len` bytes; `needed` may be NULL.
 */
int32_t fsh_config_get(const struct FshConfig *cfg,
                       const char *key,
                       char *buf,
                       size_t buf_len,
                       size_t *needed);

/**
 * Closed-form lensing shift (k² order, unbounded first-passage domain).
 *
 * # Safety
 * Pointers must be valid.
 */
int32_t fsh_lensing_analytic(const struct FshConfig *cfg, double *shift_rel);

/**
 * Full lensing shift. When the quadrature misses its tolerance the best estimate is still
 * written and `FSH_ERR_NUMERICAL` is returned.
 *
 * # Safety
 * Pointers must be valid.
 */
int32_t fsh_lensing_full(const struct FshConfig *cfg, struct FshLensingResult *result);

/**
 * DCP Monte Carlo for the toy field of order `m` (0, 1 or 2) with phase amplitude
 * `amplitude` rad, at cloud tilt `(tilt_x, tilt_y)` rad.
 *
 * # Safety
 * Pointers must be valid.
 */
int32_t fsh_dcp_simulate(const struct FshConfig *cfg,
                         uint32_t m,
                         double amplitude,
                         int32_t feed_mode,
                         double tilt_x,
                         double tilt_y,
                         struct FshDcpResult *result);

/**
 * Half difference of the single-feed φ = 0 and φ = π shifts for the toy field.
 *
 * # Safety
 * Pointers must be valid.
 */
int32_t fsh_dcp_differential(const struct FshConfig *cfg,
                             uint32_t m,
                             double amplitude,
                             double tilt_x,
                             double tilt_y,
                             double *shift_rel,
                             double *stat_err);

/**
 * Budget totals in units of 1e-16. `path` NULL uses the bundled uncertainty budget; a NaN
 * `u_a_override` keeps the file's type-A rows.
 *
 * # Safety
 * Out-pointers must be valid; `path` NULL or NUL-terminated.
 */
int32_t fsh_budget_totals(const char *path,
                          double u_a_override,
                          double *u_b,
                          double *u_a,
                          double *total);

/**
 * Zero-density extrapolation of a high/low density pair.
 *
 * # Safety
 * Out-pointers must be valid.
 */
int32_t fsh_collisional(double nu_high,
                        double nu_low,
                        double kappa,
                        double kappa_rel_unc,
                        double *corrected,
                        double *type_b);

/**
 * Weighted straight-line fit; writes the zero crossing and its standard error.
 *
 * # Safety
 * `x`, `y`, `sigma` must each point to `n` doubles.
 */
int32_t fsh_fit_zero_crossing(const double *x,
                              const double *y,
                              const double *sigma,
                              size_t n,
                              double *root,
                              double *root_sigma);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FOUNTAIN_SHIFT_H */
