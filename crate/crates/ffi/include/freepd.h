#ifndef FREEPD_H
#define FREEPD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call. The numeric values match the CLI exit codes where
 * they overlap.
 */
typedef enum FpdStatus {
  FPD_STATUS_OK = 0,
  /**
   * The input was well formed but the mathematics failed
   * (not positive definite, no certificate, ...).
   */
  FPD_STATUS_MATH_FAILURE = 1,
  FPD_STATUS_INVALID_INPUT = 2,
  FPD_STATUS_NULL_POINTER = 3,
  /**
   * A Rust panic was caught at the boundary.
   */
  FPD_STATUS_PANIC = 4,
} FpdStatus;

/**
 * A positive definite function on a ball or order ideal.
 */
typedef struct FpdFunction FpdFunction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *fpd_version(void);

/**
 * Message for the last failed call on this thread, or NULL after a
 * successful one. Valid until the next `fpd_*` call on the same thread.
 */
const char *fpd_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library.
 */
void fpd_string_free(char *s);

/**
 * # Safety
 * `phi` must be NULL or a handle returned by this library.
 */
void fpd_function_free(struct FpdFunction *phi);

/**
 * Parse a pdfun.v1 document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum FpdStatus fpd_function_from_json(const char *json, struct FpdFunction **out);

/**
 * # Safety
 * `phi` must be a live handle; `out` must be writable.
 */
enum FpdStatus fpd_function_to_json(const struct FpdFunction *phi, char **out);

/**
 * Radius of the largest ball inside the domain, and the block size `k`.
 *
 * # Safety
 * `phi` must be a live handle; the out pointers must be writable.
 */
enum FpdStatus fpd_function_shape(const struct FpdFunction *phi, size_t *out_radius, size_t *out_k);

/**
 * Write `Φ(s)` as `k*k` row-major complex entries, interleaved re/im, into
 * `out` (room for `2*k*k` doubles). The word is given by its signed letters.
 *
 * # Safety
 * `letters` must point to `len` integers (may be NULL if `len == 0`);
 * `out` must point to `cap` doubles.
 */
enum FpdStatus fpd_function_value(const struct FpdFunction *phi,
                                  const int32_t *letters,
                                  size_t len,
                                  double *out,
                                  size_t cap);

/**
 * Positivity check on the largest ball. A function that is not positive
 * definite is still `FPD_STATUS_OK`; read `out_is_pd`.
 *
 * # Safety
 * `phi` must be a live handle; the out pointers must be writable.
 */
enum FpdStatus fpd_verify(const struct FpdFunction *phi,
                          double tol,
                          bool *out_is_pd,
                          double *out_min_eigenvalue);

/**
 * Central (maximum entropy) extension to the ball of radius `n`.
 *
 * # Safety
 * `phi` must be a live handle; `out` must be writable.
 */
enum FpdStatus fpd_extend_central(const struct FpdFunction *phi,
                                  size_t n,
                                  double tol,
                                  struct FpdFunction **out);

/**
 * Extension with seeded random contractions of norm below `radius`.
 *
 * # Safety
 * `phi` must be a live handle; `out` must be writable.
 */
enum FpdStatus fpd_extend_random(const struct FpdFunction *phi,
                                 size_t n,
                                 uint64_t seed,
                                 double radius,
                                 double tol,
                                 struct FpdFunction **out);

/**
 * Extension with explicit contractions given as a params.v1 document. The
 * function is re-keyed to the letter order of the parameters if needed.
 *
 * # Safety
 * `phi` must be a live handle, `params_json` a NUL-terminated string and
 * `out` writable.
 */
enum FpdStatus fpd_extend_params(const struct FpdFunction *phi,
                                 const char *params_json,
                                 size_t n,
                                 double tol,
                                 struct FpdFunction **out);

/**
 * Contractions that regenerate `phi` from its restriction to the ball of
 * radius `from`, as a params.v1 document.
 *
 * # Safety
 * `phi` must be a live handle; `out` must be writable.
 */
enum FpdStatus fpd_extract_params(const struct FpdFunction *phi,
                                  size_t from,
                                  double tol,
                                  char **out);

/**
 * Maximal `(n+1)`-orthogonality. As with `fpd_verify`, a negative answer is
 * reported through `out_holds`, not the status.
 *
 * # Safety
 * `phi` must be a live handle; the out pointers must be writable.
 */
enum FpdStatus fpd_check_ortho(const struct FpdFunction *phi,
                               size_t n,
                               double tol,
                               bool *out_holds,
                               double *out_violation);

/**
 * `e^{-t|s|} I_k` on the ball of radius `n` in the free group on `m` letters.
 *
 * # Safety
 * `out` must be writable.
 */
enum FpdStatus fpd_haagerup(size_t m, size_t k, double t, size_t n, struct FpdFunction **out);

/**
 * # Safety
 * `phi` must be a live handle; `out` must be writable.
 */
enum FpdStatus fpd_radialize(const struct FpdFunction *phi, struct FpdFunction **out);

/**
 * Sum-of-squares certificate for an ncpoly.v1 polynomial, written as a
 * cert.v1 document. `FPD_STATUS_MATH_FAILURE` when none was found.
 *
 * # Safety
 * `ncpoly_json` must be a NUL-terminated string; `out` must be writable.
 */
enum FpdStatus fpd_factor_sos(const char *ncpoly_json, double tol, size_t max_iter, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FREEPD_H */
