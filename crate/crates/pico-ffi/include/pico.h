#ifndef PICO_H
#define PICO_H

/* Generated by cbindgen from pico-ffi; regenerate with cargo build, do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Outcome of a pico call. Anything other than `Ok` leaves a message
 retrievable with `pico_last_error_message()`.
 */
typedef enum PicoStatus {
  PICO_STATUS_OK = 0,
  /*
   A required pointer argument was NULL.
   */
  PICO_STATUS_NULL_ARGUMENT = 1,
  /*
   A string argument was not valid UTF-8.
   */
  PICO_STATUS_INVALID_UTF8 = 2,
  /*
   Config file rejected, or a setter was given an invalid value.
   */
  PICO_STATUS_CONFIG = 3,
  /*
   Dataset manifest rejected or a sample file is missing.
   */
  PICO_STATUS_MANIFEST = 4,
  /*
   A sample could not be decoded or preprocessed.
   */
  PICO_STATUS_PREPROCESS = 5,
  /*
   The inference backend failed to load or crashed mid-run.
   */
  PICO_STATUS_BACKEND = 6,
  /*
   System counters (/proc/stat, /proc/meminfo) could not be read.
   */
  PICO_STATUS_COUNTERS = 7,
  /*
   A result document did not parse or has the wrong schema version.
   */
  PICO_STATUS_PARSE_RESULT = 8,
  /*
   File read or write failed.
   */
  PICO_STATUS_IO = 9,
  /*
   The requested metric has no readings in this run.
   */
  PICO_STATUS_NO_METRIC = 10,
  /*
   Internal panic; state is still consistent but the call did nothing.
   */
  PICO_STATUS_PANIC = 11,
} PicoStatus;

/*
 Metric selector for `pico_result_summary()`.
 */
typedef enum PicoMetric {
  PICO_METRIC_LATENCY_MS = 0,
  PICO_METRIC_CPU_PCT = 1,
  PICO_METRIC_MEM_PCT = 2,
  PICO_METRIC_CONFIDENCE = 3,
} PicoMetric;

/*
 Opaque benchmark configuration handle.
 */
typedef struct PicoConfig PicoConfig;

/*
 Opaque handle to a completed run's full results.
 */
typedef struct PicoRunResult PicoRunResult;

/*
 Summary statistics for one metric over a run, mirroring the `summaries`
 block of the result JSON.
 */
typedef struct PicoMetricSummary {
  uint64_t count;
  double mean;
  double std;
  double min;
  double max;
  double p50;
  double p90;
  double p95;
  double p99;
} PicoMetricSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Version of the library as a static string. Never NULL, do not free.
 */
const char *pico_version(void);

/*
 Message for the most recent failure on this thread, empty if none yet.
 The pointer stays valid until the next failing pico call on the same
 thread. Never NULL, do not free.
 */
const char *pico_last_error_message(void);

/*
 Frees a string returned by this library through an out-parameter.
 NULL is accepted and ignored.

 # Safety
 `s` must be a pointer previously returned by a pico call, or NULL.
 */
void pico_string_free(char *s);

/*
 Loads and validates a TOML benchmark config. On success writes a new
 handle to `*out`; release it with `pico_config_free()`.

 # Safety
 `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PicoStatus pico_config_load(const char *path, struct PicoConfig **out);

/*
 Overrides the number of measured iterations. Must be at least 1.

 # Safety
 `cfg` must be a live handle from `pico_config_load()`.
 */
enum PicoStatus pico_config_set_iterations(struct PicoConfig *cfg, uint64_t iterations);

/*
 Overrides the number of unmeasured warmup iterations. Zero is allowed.

 # Safety
 `cfg` must be a live handle from `pico_config_load()`.
 */
enum PicoStatus pico_config_set_warmup(struct PicoConfig *cfg, uint64_t warmup);

/*
 Overrides the run seed, which a synthetic backend without its own seed
 inherits.

 # Safety
 `cfg` must be a live handle from `pico_config_load()`.
 */
enum PicoStatus pico_config_set_seed(struct PicoConfig *cfg, uint64_t seed);

/*
 Releases a config handle. NULL is accepted and ignored.

 # Safety
 `cfg` must be a handle from `pico_config_load()` not yet freed, or NULL.
 */
void pico_config_free(struct PicoConfig *cfg);

/*
 Runs the benchmark described by `cfg`: loads the dataset, runs warmup and
 measured iterations against the configured backend, and on success writes
 a result handle to `*out`. Release it with `pico_result_free()`. Platform
 and system counters are detected from the host. If the backend fails
 mid-run no handle is produced; partial data is not retained.

 # Safety
 `cfg` must be a live config handle and `out` a valid pointer.
 */
enum PicoStatus pico_run(const struct PicoConfig *cfg, struct PicoRunResult **out);

/*
 Reads a result JSON file produced by a previous run.

 # Safety
 `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PicoStatus pico_result_load(const char *path, struct PicoRunResult **out);

/*
 Parses a result document from a JSON string.

 # Safety
 `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PicoStatus pico_result_from_json(const char *text, struct PicoRunResult **out);

/*
 Serializes the result to its JSON document form. The returned string is
 owned by the caller; release with `pico_string_free()`.

 # Safety
 `res` must be a live result handle and `out` a valid pointer.
 */
enum PicoStatus pico_result_to_json(const struct PicoRunResult *res, char **out);

/*
 Serializes the per-iteration records to CSV, header line first. The
 returned string is owned by the caller; release with `pico_string_free()`.

 # Safety
 `res` must be a live result handle and `out` a valid pointer.
 */
enum PicoStatus pico_result_to_csv(const struct PicoRunResult *res, char **out);

/*
 Writes the result JSON document to a file.

 # Safety
 `res` must be a live result handle, `path` a NUL-terminated string.
 */
enum PicoStatus pico_result_write_json(const struct PicoRunResult *res, const char *path);

/*
 Writes the per-iteration records to a CSV file.

 # Safety
 `res` must be a live result handle, `path` a NUL-terminated string.
 */
enum PicoStatus pico_result_write_csv(const struct PicoRunResult *res, const char *path);

/*
 Number of measured iteration records in the result. Returns 0 for NULL.

 # Safety
 `res` must be a live result handle or NULL.
 */
uint64_t pico_result_record_count(const struct PicoRunResult *res);

/*
 Copies the model id into a caller-owned string; release with
 `pico_string_free()`.

 # Safety
 `res` must be a live result handle and `out` a valid pointer.
 */
enum PicoStatus pico_result_model_id(const struct PicoRunResult *res, char **out);

/*
 Copies the summary statistics for one metric into `*out`. Returns
 `NoMetric` for `CpuPct` when no iteration produced a CPU reading.

 # Safety
 `res` must be a live result handle and `out` a valid pointer.
 */
enum PicoStatus pico_result_summary(const struct PicoRunResult *res,
                                    enum PicoMetric metric,
                                    struct PicoMetricSummary *out);

/*
 CPU utilization over one window spanning the whole measured phase.
 Returns `NoMetric` when no counter tick advanced during the run.

 # Safety
 `res` must be a live result handle and `out` a valid pointer.
 */
enum PicoStatus pico_result_cpu_pct_run(const struct PicoRunResult *res, double *out);

/*
 Releases a result handle. NULL is accepted and ignored.

 # Safety
 `res` must be a handle not yet freed, or NULL.
 */
void pico_result_free(struct PicoRunResult *res);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PICO_H */
