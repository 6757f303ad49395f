#ifndef LATTICE_STRETCH_H
#define LATTICE_STRETCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LsStatus {
  LS_STATUS_OK = 0,
  LS_STATUS_NULL_POINTER = 1,
  LS_STATUS_INVALID_ARGUMENT = 2,
  LS_STATUS_NOT_APPLICABLE = 3,
  LS_STATUS_HYPOTHESIS_UNAVAILABLE = 4,
  LS_STATUS_HYPOTHESIS_VIOLATED = 5,
  LS_STATUS_NO_LATTICE_POINT = 6,
  LS_STATUS_DEGENERATE = 7,
  LS_STATUS_NUMERICAL_FAILURE = 8,
  LS_STATUS_PANIC = 9,
} LsStatus;

typedef enum LsMode {
  LS_MODE_MAX_INTERIOR = 0,
  LS_MODE_MIN_CLOSED = 1,
} LsMode;

/**
 * A curve handle.
 */
typedef struct LsCurve LsCurve;

/**
 * An optimum-report handle.
 */
typedef struct LsOptimum LsOptimum;

/**
 * One component of an optimizer set.
 */
typedef struct LsInterval {
  double lo;
  double hi;
  bool lo_closed;
  bool hi_closed;
} LsInterval;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static nul-terminated string.
 */
const char *ls_version(void);

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into the library from the same thread.
 */
const char *ls_last_error_message(void);

/**
 * Creates the unit p-circle `xᵖ + yᵖ = 1`.
 *
 * # Safety
 * `out_curve` must be valid for writes.
 */
enum LsStatus ls_curve_new_p_ellipse(double p, struct LsCurve **out_curve);

/**
 * Releases a curve. NULL is ignored.
 *
 * # Safety
 * `curve` must come from [`ls_curve_new_p_ellipse`] and not be freed twice.
 */
void ls_curve_free(struct LsCurve *curve);

/**
 * # Safety
 * `curve` must be a live handle and `out_area` valid for writes.
 */
enum LsStatus ls_curve_area(const struct LsCurve *curve, double *out_area);

/**
 * `N(r, s)`: positive-integer points inside or on `rΓ(s)`.
 *
 * # Safety
 * `curve` must be a live handle and `out_count` valid for writes.
 */
enum LsStatus ls_count_interior(const struct LsCurve *curve,
                                double r,
                                double s,
                                double tol_rel,
                                uint64_t *out_count);

/**
 * `𝒩(r, s)`: nonnegative-integer points inside or on `rΓ(s)`.
 *
 * # Safety
 * `curve` must be a live handle and `out_count` valid for writes.
 */
enum LsStatus ls_count_closed(const struct LsCurve *curve,
                              double r,
                              double s,
                              double tol_rel,
                              uint64_t *out_count);

/**
 * Upper bound on `N(r, s)`; `NOT_APPLICABLE` when `r < 2s/L`.
 *
 * # Safety
 * `curve` must be a live handle and `out_bound` valid for writes.
 */
enum LsStatus ls_upper_bound(const struct LsCurve *curve, double r, double s, double *out_bound);

/**
 * Lower bound on `𝒩(r, s)`.
 *
 * # Safety
 * `curve` must be a live handle and `out_bound` valid for writes.
 */
enum LsStatus ls_lower_bound(const struct LsCurve *curve, double r, double s, double *out_bound);

/**
 * Optimal stretch set of `curve` at radius `r`.
 *
 * # Safety
 * `curve` must be a live handle and `out_optimum` valid for writes.
 */
enum LsStatus ls_optimum_new(const struct LsCurve *curve,
                             double r,
                             enum LsMode mode,
                             double tol_rel,
                             struct LsOptimum **out_optimum);

/**
 * Releases an optimum report. NULL is ignored.
 *
 * # Safety
 * `optimum` must come from [`ls_optimum_new`] and not be freed twice.
 */
void ls_optimum_free(struct LsOptimum *optimum);

/**
 * # Safety
 * `optimum` must be a live handle; the out-pointers must be valid for writes.
 */
enum LsStatus ls_optimum_summary(const struct LsOptimum *optimum,
                                 uint64_t *out_best_count,
                                 double *out_dist_to_one,
                                 double *out_witness_s,
                                 size_t *out_interval_count);

/**
 * The `index`-th optimizer interval, in increasing order of `s`.
 *
 * # Safety
 * `optimum` must be a live handle and `out_interval` valid for writes.
 */
enum LsStatus ls_optimum_interval(const struct LsOptimum *optimum,
                                  size_t index,
                                  struct LsInterval *out_interval);

/**
 * `λₙ` of the rectangle `(0, π/s) × (0, sπ)`.
 *
 * # Safety
 * `out_lambda` must be valid for writes.
 */
enum LsStatus ls_rectangle_eigenvalue(double s, uint64_t n, double *out_lambda);

/**
 * `n`-th approximate eigenvalue of a product of two `d`-dimensional factors.
 *
 * # Safety
 * `out_lambda` must be valid for writes.
 */
enum LsStatus ls_product_eigenvalue(uint32_t d, double s, uint64_t n, double *out_lambda);

/**
 * Aspect minimizing `λₙ`. `d = 0` selects the rectangle, `d ≥ 3` the
 * approximate product spectrum.
 *
 * # Safety
 * The out-pointers must be valid for writes.
 */
enum LsStatus ls_minimizing_aspect(uint64_t n,
                                   uint32_t d,
                                   double *out_s_star,
                                   double *out_lambda_star);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LATTICE_STRETCH_H */
