#ifndef CYCLE_LAPLACIAN_H
#define CYCLE_LAPLACIAN_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Root-finding method for the even-index eigenvalues.
 */
typedef enum ClMethod {
  CL_METHOD_NEWTON = 0,
  CL_METHOD_BISECTION = 1,
  CL_METHOD_FIXED_POINT = 2,
} ClMethod;

/**
 * Status codes returned by every fallible function.
 */
typedef enum ClStatus {
  CL_STATUS_OK = 0,
  CL_STATUS_NULL_POINTER = 1,
  CL_STATUS_INVALID_UTF8 = 2,
  /**
   * Bad alpha, order, precision or method.
   */
  CL_STATUS_INVALID_ARGUMENT = 3,
  CL_STATUS_INDEX_OUT_OF_RANGE = 4,
  /**
   * The solver refused the instance or failed to converge.
   */
  CL_STATUS_SOLVER_FAILED = 5,
  CL_STATUS_BUFFER_TOO_SMALL = 6,
  CL_STATUS_PANIC = 7,
} ClStatus;

/**
 * One eigenvector, unnormalized.
 */
typedef struct ClEigenvector ClEigenvector;

/**
 * All eigenvalues of one instance, ascending.
 */
typedef struct ClSpectrum ClSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *cl_version(void);

/**
 * Message for the last failed call on this thread, or NULL after a success.
 * The pointer stays valid until the next call into the library on this thread.
 */
const char *cl_last_error(void);

/**
 * Computes the spectrum of the cycle Laplacian with edge weight `alpha`
 * (a decimal or `p/q` string, real, in (0, 1)) at `bits` of precision.
 * `method` is a [`ClMethod`] value.
 *
 * # Safety
 * `alpha` must be a valid C string and `out` a writable pointer.
 */
enum ClStatus cl_spectrum_new(const char *alpha,
                              size_t n,
                              int32_t method,
                              uint32_t bits,
                              struct ClSpectrum **out);

/**
 * Number of eigenvalues (the order `n`); 0 for NULL.
 *
 * # Safety
 * `s` must be NULL or a live handle.
 */
size_t cl_spectrum_len(const struct ClSpectrum *s);

/**
 * `lambda_j` rounded to double, `j` 1-based.
 *
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
enum ClStatus cl_spectrum_lambda(const struct ClSpectrum *s, size_t j, double *out);

/**
 * `theta_j` rounded to double, `j` 1-based.
 *
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
enum ClStatus cl_spectrum_theta(const struct ClSpectrum *s, size_t j, double *out);

/**
 * Certified bound on the error in `theta_j` as a double (0 for odd `j`,
 * which are closed form; may underflow to 0 at high precision).
 *
 * # Safety
 * `s` must be a live handle and `out` writable.
 */
enum ClStatus cl_spectrum_certified_error(const struct ClSpectrum *s, size_t j, double *out);

/**
 * `lambda_j` at full precision as a decimal string. Writes at most `cap`
 * bytes including the terminator. `needed` (optional) receives the required
 * capacity; if `cap` is too small nothing is written and
 * `BufferTooSmall` is returned.
 *
 * # Safety
 * `buf` must have room for `cap` bytes; `needed` may be NULL.
 */
enum ClStatus cl_spectrum_lambda_str(const struct ClSpectrum *s,
                                     size_t j,
                                     char *buf,
                                     size_t cap,
                                     size_t *needed);

/**
 * # Safety
 * `s` must be NULL or a handle from [`cl_spectrum_new`] not yet freed.
 */
void cl_spectrum_free(struct ClSpectrum *s);

/**
 * Eigenvector for index `j` (1-based). `alpha` may be complex, e.g.
 * `"0.3+0.2i"`; even `j` is solved by Newton's method.
 *
 * # Safety
 * `alpha` must be a valid C string and `out` a writable pointer.
 */
enum ClStatus cl_eigenvector_new(const char *alpha,
                                 size_t n,
                                 size_t j,
                                 uint32_t bits,
                                 struct ClEigenvector **out);

/**
 * Number of coordinates; 0 for NULL.
 *
 * # Safety
 * `v` must be NULL or a live handle.
 */
size_t cl_eigenvector_len(const struct ClEigenvector *v);

/**
 * Coordinate `k` (1-based).
 *
 * # Safety
 * `v` must be a live handle; `re` and `im` writable.
 */
enum ClStatus cl_eigenvector_get(const struct ClEigenvector *v, size_t k, double *re, double *im);

/**
 * Euclidean norm and its closed-form asymptotic counterpart.
 *
 * # Safety
 * `v` must be a live handle; outputs writable.
 */
enum ClStatus cl_eigenvector_norms(const struct ClEigenvector *v, double *exact, double *asympt);

/**
 * # Safety
 * `v` must be NULL or a handle from [`cl_eigenvector_new`] not yet freed.
 */
void cl_eigenvector_free(struct ClEigenvector *v);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CYCLE_LAPLACIAN_H */
