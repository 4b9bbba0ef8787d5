#ifndef SCHOTTKY_LAB_H
#define SCHOTTKY_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every `sl_` function.
 */
typedef enum SlStatus {
  SL_STATUS_OK = 0,
  SL_STATUS_NULL_POINTER = 1,
  SL_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed fixture or config document.
   */
  SL_STATUS_SCHEMA = 3,
  /**
   * Period matrix, characteristic, dimension or argument rejected.
   */
  SL_STATUS_INVALID_INPUT = 4,
  /**
   * Truncation cap, non-convergence or another numerical failure.
   */
  SL_STATUS_NUMERICAL = 5,
  SL_STATUS_UNKNOWN_CHECK = 6,
  SL_STATUS_IO = 7,
  /**
   * Index past the end of a report.
   */
  SL_STATUS_OUT_OF_RANGE = 8,
  SL_STATUS_PANIC = 9,
} SlStatus;

/**
 * Validated period matrix.
 */
typedef struct SlPeriodMatrix SlPeriodMatrix;

/**
 * Sorted reports of one check run.
 */
typedef struct SlReport SlReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, copied into `buf`.
 * Returns the size needed including the terminator.
 *
 * # Safety
 * `buf` is null or valid for `cap` bytes.
 */
size_t sl_last_error_message(char *buf, size_t cap);

/**
 * Period matrix from `g*g` row-major entries stored as `re, im` pairs.
 *
 * # Safety
 * `entries` is valid for `2*g*g` doubles; `out` is a valid pointer.
 */
enum SlStatus sl_period_matrix_new(size_t g, const double *entries, struct SlPeriodMatrix **out);

/**
 * Period matrix from a fixture JSON document.
 *
 * # Safety
 * `json` is a NUL-terminated string; `out` is a valid pointer.
 */
enum SlStatus sl_period_matrix_from_fixture(const char *json, struct SlPeriodMatrix **out);

/**
 * Genus of `tau`, 0 for a null handle.
 *
 * # Safety
 * `tau` is null or a live handle.
 */
size_t sl_period_matrix_genus(const struct SlPeriodMatrix *tau);

/**
 * # Safety
 * `tau` is null or a handle not yet freed.
 */
void sl_period_matrix_free(struct SlPeriodMatrix *tau);

/**
 * `θ[ε;δ](τ, z)` with the default truncation policy. `z` holds `g` pairs
 * `re, im`; `eps` and `delta` hold `g` entries in {0, 0.5} or are both null.
 * Writes the value to `out[0..2]` and the truncation error bound to
 * `error_bound` when it is not null.
 *
 * # Safety
 * Pointers are valid for the sizes above.
 */
enum SlStatus sl_theta_eval(const struct SlPeriodMatrix *tau,
                            const double *z,
                            const double *eps,
                            const double *delta,
                            double *out,
                            double *error_bound);

/**
 * Run the check described by a JSON config (the CLI `--config` schema) on
 * `threads` workers, 0 for the default pool.
 *
 * # Safety
 * `config_json` is a NUL-terminated string; `out` is a valid pointer.
 */
enum SlStatus sl_run_check(const char *config_json, size_t threads, struct SlReport **out);

/**
 * Operator-algebra self-test.
 *
 * # Safety
 * `out` is a valid pointer.
 */
enum SlStatus sl_ops_selftest(struct SlReport **out);

/**
 * Number of cases, 0 for a null handle.
 *
 * # Safety
 * `report` is null or a live handle.
 */
size_t sl_report_len(const struct SlReport *report);

/**
 * 1 when every case passes, 0 otherwise or for a null handle.
 *
 * # Safety
 * `report` is null or a live handle.
 */
int32_t sl_report_all_pass(const struct SlReport *report);

/**
 * Residual, normalizer, tolerance and pass flag of case `index`.
 *
 * # Safety
 * `report` is a live handle; the out pointers are valid.
 */
enum SlStatus sl_report_case(const struct SlReport *report,
                             size_t index,
                             double *residual,
                             double *normalizer,
                             double *tolerance,
                             int32_t *pass);

/**
 * CSV text of the report copied into `buf` when it fits. Writes the size
 * needed, terminator included, to `needed`.
 *
 * # Safety
 * `report` is a live handle; `buf` is null or valid for `cap` bytes.
 */
enum SlStatus sl_report_csv(const struct SlReport *report, char *buf, size_t cap, size_t *needed);

/**
 * # Safety
 * `report` is null or a handle not yet freed.
 */
void sl_report_free(struct SlReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCHOTTKY_LAB_H */
