#ifndef CONIC_CONDITION_H
#define CONIC_CONDITION_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ConicStatus {
  CONIC_STATUS_OK = 0,
  CONIC_STATUS_INVALID_INPUT = 1,
  CONIC_STATUS_DEGENERATE_ROW = 2,
  CONIC_STATUS_SINGULAR_SUBSET = 3,
  CONIC_STATUS_DEPENDENT_SET = 4,
  CONIC_STATUS_NO_CONVERGENCE = 5,
  CONIC_STATUS_UNSUPPORTED = 6,
  CONIC_STATUS_MOMENT_DIVERGENT = 7,
  CONIC_STATUS_INSUFFICIENT_TAIL_DATA = 8,
  CONIC_STATUS_BUDGET_EXCEEDED = 9,
  CONIC_STATUS_PARSE = 10,
  CONIC_STATUS_IO = 11,
  CONIC_STATUS_NULL_POINTER = 12,
  CONIC_STATUS_PANIC = 13,
} ConicStatus;

typedef enum ConicClass {
  CONIC_CLASS_STRICTLY_FEASIBLE = 0,
  CONIC_CLASS_INFEASIBLE = 1,
  CONIC_CLASS_ILL_POSED_NUMERICAL = 2,
} ConicClass;

typedef enum ConicRule {
  CONIC_RULE_FIRST_VIOLATED = 0,
  CONIC_RULE_MAX_VIOLATION = 1,
} ConicRule;

/**
 * Opaque matrix with unit rows.
 */
typedef struct ConicMatrix ConicMatrix;

/**
 * Opaque condition report.
 */
typedef struct ConicReport ConicReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *conic_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *conic_version(void);

/**
 * Builds a matrix from `n * m` row-major values, normalizing every row.
 *
 * # Safety
 * `data` must point to `n * m` readable doubles and `out` to a writable
 * handle slot.
 */
enum ConicStatus conic_matrix_new(size_t m, size_t n, const double *data, struct ConicMatrix **out);

/**
 * Loads a CSV or JSON matrix file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable handle slot.
 */
enum ConicStatus conic_matrix_load(const char *path, struct ConicMatrix **out);

/**
 * # Safety
 * `a` must be NULL or a handle from this library not yet freed.
 */
void conic_matrix_free(struct ConicMatrix *a);

/**
 * # Safety
 * `a` must be a live matrix handle; `m` and `n` may be NULL.
 */
enum ConicStatus conic_matrix_dims(const struct ConicMatrix *a, size_t *m, size_t *n);

/**
 * Classifies the system and computes its condition number. `exhaustive`
 * forces the full subset scan on the infeasible side.
 *
 * # Safety
 * `a` must be a live matrix handle and `out` a writable handle slot.
 */
enum ConicStatus conic_classify(const struct ConicMatrix *a,
                                bool exhaustive,
                                struct ConicReport **out);

/**
 * # Safety
 * `r` must be NULL or a handle from this library not yet freed.
 */
void conic_report_free(struct ConicReport *r);

/**
 * # Safety
 * `r` must be a live report handle.
 */
enum ConicClass conic_report_class(const struct ConicReport *r);

/**
 * `theta(A)` in radians.
 *
 * # Safety
 * `r` must be a live report handle.
 */
double conic_report_theta(const struct ConicReport *r);

/**
 * The condition number; `INFINITY` for ill-posed systems.
 *
 * # Safety
 * `r` must be a live report handle.
 */
double conic_report_cond(const struct ConicReport *r);

/**
 * Copies the witness cap center (length m) into `buf`.
 *
 * # Safety
 * `r` must be a live report handle and `buf` must hold `len` doubles.
 */
enum ConicStatus conic_report_center(const struct ConicReport *r, double *buf, size_t len);

/**
 * The report as JSON; free the string with [`conic_string_free`].
 *
 * # Safety
 * `r` must be a live report handle and `out` a writable pointer slot.
 */
enum ConicStatus conic_report_to_json(const struct ConicReport *r, char **out);

/**
 * Parses a JSON report.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable handle slot.
 */
enum ConicStatus conic_report_from_json(const char *json, struct ConicReport **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library not yet freed.
 */
void conic_string_free(char *s);

/**
 * Checks a report against its matrix; writes the verdict to `valid`.
 *
 * # Safety
 * `a` and `r` must be live handles and `valid` writable.
 */
enum ConicStatus conic_verify(const struct ConicMatrix *a,
                              const struct ConicReport *r,
                              bool *valid);

/**
 * Runs the perceptron for at most `cap` updates. `solution` (length m) may
 * be NULL; it is written only when the run solved the system.
 *
 * # Safety
 * `a` must be a live matrix handle, `iterations` and `solved` writable, and
 * `solution` NULL or room for m doubles.
 */
enum ConicStatus conic_perceptron(const struct ConicMatrix *a,
                                  uint64_t cap,
                                  enum ConicRule rule,
                                  uint64_t *iterations,
                                  bool *solved,
                                  double *solution);

/**
 * Normalized measure of a cap of angular radius `rho` on the sphere in R^m.
 *
 * # Safety
 * `out` must be writable.
 */
enum ConicStatus conic_cap_measure(size_t m, double rho, double *out);

/**
 * `I_m(rho)`, the integral of `sin^m` over `[0, rho]`.
 *
 * # Safety
 * `out` must be writable.
 */
enum ConicStatus conic_sin_power_integral(int64_t m, double rho, double *out);

/**
 * Clamped upper bound on `P[C(A) >= t]`.
 *
 * # Safety
 * `out` must be writable.
 */
enum ConicStatus conic_upper_tail_bound(size_t m, size_t n, double t, double *out);

/**
 * Upper bound on `E[log C(A)]`.
 *
 * # Safety
 * `out` must be writable.
 */
enum ConicStatus conic_mean_bound(size_t m, size_t n, double *out);

/**
 * Upper bound on `E[C(A)^gamma]` for `0 < gamma < 1`.
 *
 * # Safety
 * `out` must be writable.
 */
enum ConicStatus conic_moment_bound_cori(size_t m, size_t n, double gamma, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONIC_CONDITION_H */
