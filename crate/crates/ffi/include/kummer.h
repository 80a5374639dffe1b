#ifndef KUMMER_H
#define KUMMER_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KummerStatus {
  KUMMER_STATUS_OK = 0,
  KUMMER_STATUS_USAGE = 1,
  KUMMER_STATUS_DOMAIN = 2,
  KUMMER_STATUS_NUMERICAL = 3,
  KUMMER_STATUS_NULL_POINTER = 4,
  KUMMER_STATUS_INTERNAL = 5,
} KummerStatus;

typedef enum KummerValueStatus {
  KUMMER_VALUE_STATUS_NORMAL = 0,
  KUMMER_VALUE_STATUS_UNDERFLOW = 1,
  KUMMER_VALUE_STATUS_OVERFLOW = 2,
} KummerValueStatus;

typedef enum KummerWhich {
  KUMMER_WHICH_M = 0,
  KUMMER_WHICH_U = 1,
} KummerWhich;

/**
 * Normalized expansion coefficients. Opaque to C.
 */
typedef struct KummerCoefficients KummerCoefficients;

/**
 * Evaluation settings. Opaque to C.
 */
typedef struct KummerContext KummerContext;

/**
 * Result of an evaluation. `value` is zero unless `status` is `Normal`;
 * `sign` and `log_magnitude` are always set.
 */
typedef struct KummerResult {
  double value;
  double log_magnitude;
  int32_t sign;
  uint32_t terms_used;
  double last_term_ratio;
  bool domain_ok;
  enum KummerValueStatus status;
} KummerResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a context with `terms` correction terms (0..=8) and saddle bound
 * `rho` in (0, 1). Returns null on invalid input.
 */
struct KummerContext *kummer_context_new(uint32_t terms, double rho);

/**
 * # Safety
 * `ctx` must be null or a pointer returned by [`kummer_context_new`] that
 * has not been freed.
 */
void kummer_context_free(struct KummerContext *ctx);

/**
 * `M(a,b,z)`, or `M̃(a,b,z)` when `scaled`.
 *
 * # Safety
 * `ctx` must be a live context and `out` must point to writable memory for
 * one `KummerResult`.
 */
enum KummerStatus kummer_eval_m(const struct KummerContext *ctx,
                                double a,
                                double b,
                                double z,
                                bool scaled,
                                struct KummerResult *out);

/**
 * `U(a,b+1,z)`, or `Ũ(a,b+1,z)` when `scaled`.
 *
 * # Safety
 * As for [`kummer_eval_m`].
 */
enum KummerStatus kummer_eval_u(const struct KummerContext *ctx,
                                double a,
                                double b,
                                double z,
                                bool scaled,
                                struct KummerResult *out);

/**
 * Computes `f̃_0..f̃_terms` (or `p̃_n` for U) at the given point and stores a
 * new handle in `*out`. For U, `b` is the `b` of `U(a, b+1, z)`.
 *
 * # Safety
 * `out` must point to writable memory for one pointer.
 */
enum KummerStatus kummer_coefficients_new(enum KummerWhich which,
                                          double a,
                                          double b,
                                          double z,
                                          uint32_t terms,
                                          struct KummerCoefficients **out);

/**
 * Number of stored coefficients; 0 for a null handle.
 *
 * # Safety
 * `c` must be null or a live coefficient handle.
 */
size_t kummer_coefficients_len(const struct KummerCoefficients *c);

/**
 * Writes coefficient `index` to `*out`.
 *
 * # Safety
 * `c` must be a live coefficient handle and `out` writable.
 */
enum KummerStatus kummer_coefficients_f_tilde(const struct KummerCoefficients *c,
                                              size_t index,
                                              double *out);

/**
 * # Safety
 * `c` must be null or a handle from [`kummer_coefficients_new`] that has
 * not been freed.
 */
void kummer_coefficients_free(struct KummerCoefficients *c);

/**
 * Residual of the scaled three-term recurrence for `M̃` or `Ũ` at
 * `(a, b, z)`, where `Ũ(a,b,z)` has second argument `b`.
 *
 * # Safety
 * `out` must be writable.
 */
enum KummerStatus kummer_recurrence_residual(enum KummerWhich which,
                                             double a,
                                             double b,
                                             double z,
                                             uint32_t terms,
                                             double *out);

/**
 * Residual of the scaled Wronskian relation at `(a, b, z)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum KummerStatus kummer_wronskian_residual(double a,
                                            double b,
                                            double z,
                                            uint32_t terms,
                                            double *out);

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *kummer_last_error_message(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* KUMMER_H */
