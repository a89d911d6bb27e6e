#ifndef HRVLAB_H
#define HRVLAB_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HrvStatus {
  HRV_STATUS_OK = 0,
  HRV_STATUS_NULL_POINTER = 1,
  HRV_STATUS_INVALID_STRING = 2,
  HRV_STATUS_USAGE = 3,
  HRV_STATUS_CONFIG = 4,
  HRV_STATUS_DOMAIN = 5,
  HRV_STATUS_DEGENERATE_QUANTILE = 6,
  HRV_STATUS_DEGENERATE_DATA = 7,
  HRV_STATUS_PARSE = 8,
  HRV_STATUS_IO = 9,
  HRV_STATUS_PANIC = 10,
} HrvStatus;

/**
 * Result of running the detectors on a batch.
 */
typedef struct HrvReport HrvReport;

/**
 * Generated or caller-supplied sample of nonnegative pairs.
 */
typedef struct HrvSampleBatch HrvSampleBatch;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. Valid until
 * the next failing call on the same thread; do not free.
 */
const char *hrv_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hrv_version(void);

/**
 * Draws `n` pairs from a generator spec given as JSON.
 *
 * # Safety
 * `spec_json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum HrvStatus hrv_generate_json(const char *spec_json,
                                 size_t n,
                                 uint64_t seed,
                                 size_t partitions,
                                 struct HrvSampleBatch **out);

/**
 * Draws `n` pairs from a canned experiment such as `"ex31-case1"`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a writable pointer.
 */
enum HrvStatus hrv_generate_experiment(const char *name,
                                       size_t n,
                                       uint64_t seed,
                                       size_t partitions,
                                       struct HrvSampleBatch **out);

/**
 * Copies `len` pairs from two coordinate arrays into a new batch.
 *
 * # Safety
 * `z1` and `z2` must each point to `len` readable doubles.
 */
enum HrvStatus hrv_batch_from_pairs(const double *z1,
                                    const double *z2,
                                    size_t len,
                                    struct HrvSampleBatch **out);

/**
 * Number of pairs in a batch; 0 for null.
 *
 * # Safety
 * `batch` must be null or a live handle.
 */
size_t hrv_batch_len(const struct HrvSampleBatch *batch);

/**
 * Reads pair `i`.
 *
 * # Safety
 * `batch` must be a live handle; `z1` and `z2` writable.
 */
enum HrvStatus hrv_batch_get(const struct HrvSampleBatch *batch, size_t i, double *z1, double *z2);

/**
 * # Safety
 * `batch` must be null or a handle not yet freed.
 */
void hrv_batch_free(struct HrvSampleBatch *batch);

/**
 * Runs the detectors. `config_json` may be null for defaults.
 *
 * # Safety
 * `batch` must be a live handle, `config_json` null or NUL-terminated, `out` writable.
 */
enum HrvStatus hrv_detect(const struct HrvSampleBatch *batch,
                          const char *config_json,
                          struct HrvReport **out);

/**
 * Serializes a report as JSON. Free the string with [`hrv_string_free`].
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum HrvStatus hrv_report_json(const struct HrvReport *report, char **out);

/**
 * Value of a report series at `k`; NaN when the label or `k` is absent.
 *
 * # Safety
 * `report` must be a live handle and `label` NUL-terminated.
 */
double hrv_report_value(const struct HrvReport *report, const char *label, size_t k);

/**
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void hrv_report_free(struct HrvReport *report);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void hrv_string_free(char *s);

/**
 * Hill estimate of the tail index from the `k` largest of `len` positive values.
 *
 * # Safety
 * `x` must point to `len` readable doubles.
 */
enum HrvStatus hrv_hill(const double *x, size_t len, size_t k, double *out);

/**
 * Hillish statistic of `eta` concomitants ordered by `xi`.
 *
 * # Safety
 * `xi` and `eta` must each point to `len` readable doubles.
 */
enum HrvStatus hrv_hillish(const double *xi, const double *eta, size_t len, size_t k, double *out);

/**
 * Pickandsish statistic at level `q`.
 *
 * # Safety
 * `xi` and `eta` must each point to `len` readable doubles.
 */
enum HrvStatus hrv_pickandsish(const double *xi,
                               const double *eta,
                               size_t len,
                               size_t k,
                               double q,
                               double *out);

/**
 * Polar coordinates relative to the axes. `which_larger` is 1 or 2 for the
 * larger coordinate, 0 on a tie.
 *
 * # Safety
 * Output pointers must be writable.
 */
enum HrvStatus hrv_gpolar_axes(double z1,
                               double z2,
                               double *radius,
                               double *theta,
                               int32_t *which_larger);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HRVLAB_H */
