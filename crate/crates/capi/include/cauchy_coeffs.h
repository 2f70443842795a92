#ifndef CAUCHY_COEFFS_H
#define CAUCHY_COEFFS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CcStatus {
  CC_STATUS_OK = 0,
  CC_STATUS_NULL_POINTER = 1,
  CC_STATUS_INVALID_UTF8 = 2,
  CC_STATUS_SCHEMA = 3,
  CC_STATUS_IO = 4,
  CC_STATUS_PANIC = 5,
  CC_STATUS_DOMAIN = 10,
  CC_STATUS_PRECONDITION = 11,
  CC_STATUS_RANGE = 12,
  CC_STATUS_CONSTRUCTION = 13,
  CC_STATUS_DIVISION = 14,
  CC_STATUS_SINGULARITY = 15,
  CC_STATUS_GEOMETRY = 16,
  CC_STATUS_DEGREE_CAP = 17,
  CC_STATUS_RESOURCE = 18,
  CC_STATUS_UNSUPPORTED = 19,
  CC_STATUS_INVALID = 20,
} CcStatus;

/**
 * Opaque majorant `w`.
 */
typedef struct CcMajorant CcMajorant;

/**
 * Opaque Taylor polynomial.
 */
typedef struct CcSeries CcSeries;

/**
 * Opaque Young function.
 */
typedef struct CcYoung CcYoung;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *cc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cc_version(void);

/**
 * `Φ(t) = t^p`, `p ≥ 1`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum CcStatus cc_young_power(double p, struct CcYoung **out);

/**
 * `Φ(t) = t^p·ln(e + 1/t)^q`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum CcStatus cc_young_power_log(double p, double q, struct CcYoung **out);

/**
 * # Safety
 * `h` must be null or a handle from a `cc_young_*` constructor not yet freed.
 */
void cc_young_free(struct CcYoung *h);

/**
 * `Φ(x)`.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum CcStatus cc_young_eval(const struct CcYoung *h, double x, double *out);

/**
 * `Φ*(x) = sup_y (xy − Φ(y))`.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum CcStatus cc_young_conjugate(const struct CcYoung *h, double x, double *out);

/**
 * Luxemburg norm of the complex vector `re + i·im`; `im` may be null.
 *
 * # Safety
 * `re` (and `im` when non-null) must point to `len` readable doubles.
 */
enum CcStatus cc_orlicz_norm(const struct CcYoung *h,
                             const double *re,
                             const double *im,
                             size_t len,
                             double *out);

/**
 * Polynomial with coefficients `re[n] + i·im[n]`; `im` may be null.
 *
 * # Safety
 * `re` (and `im` when non-null) must point to `len` readable doubles; `out`
 * must be writable.
 */
enum CcStatus cc_series_new(const double *re, const double *im, size_t len, struct CcSeries **out);

/**
 * # Safety
 * `h` must be null or a handle from [`cc_series_new`] not yet freed.
 */
void cc_series_free(struct CcSeries *h);

/**
 * # Safety
 * `h` must be a live handle.
 */
size_t cc_series_degree(const struct CcSeries *h);

/**
 * `f(z)` for `z = re + i·im`.
 *
 * # Safety
 * `h` must be a live handle; `out_re`, `out_im` writable.
 */
enum CcStatus cc_series_eval(const struct CcSeries *h,
                             double re,
                             double im,
                             double *out_re,
                             double *out_im);

/**
 * `w(t) = t^a` on dyadic nodes `2^{-k}`, `k ≤ k_max`.
 *
 * # Safety
 * `out` must be writable.
 */
enum CcStatus cc_majorant_power(double a, size_t k_max, struct CcMajorant **out);

/**
 * `w ≡ c`.
 *
 * # Safety
 * `out` must be writable.
 */
enum CcStatus cc_majorant_constant(double c, size_t k_max, struct CcMajorant **out);

/**
 * # Safety
 * `h` must be null or a handle from a `cc_majorant_*` constructor not yet freed.
 */
void cc_majorant_free(struct CcMajorant *h);

/**
 * `‖f‖_w` over the default disk grid (radii `1 − 2^{-j}`, `j ≤ 12`, 256 angles).
 *
 * # Safety
 * `f`, `w` must be live handles and `out` writable.
 */
enum CcStatus cc_bloch_norm(const struct CcSeries *f, const struct CcMajorant *w, double *out);

/**
 * Max residual of the Clark kernel identity for the atomic measure
 * `Σ mass[i]·δ_{θ[i]}` (angles in turns) over an `n × n` grid of radius
 * `radius ≤ 0.9`.
 *
 * # Safety
 * `theta`, `mass` must point to `n_atoms` readable doubles; `out` writable.
 */
enum CcStatus cc_clark_kernel_residual(const double *theta,
                                       const double *mass,
                                       size_t n_atoms,
                                       double alpha,
                                       size_t degree,
                                       size_t grid_n,
                                       double radius,
                                       double *out);

/**
 * Runs a JSON experiment config in memory. On success `*out_json` holds a
 * document with `summary`, `manifest` and `results_csv`; release it with
 * [`cc_string_free`].
 *
 * # Safety
 * `config` must be a NUL-terminated string and `out_json` writable.
 */
enum CcStatus cc_run_experiment_json(const char *config, char **out_json);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void cc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAUCHY_COEFFS_H */
