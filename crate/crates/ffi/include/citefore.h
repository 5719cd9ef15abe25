/* C ABI for the citefore citation-impact prediction library. */

#ifndef CITEFORE_H
#define CITEFORE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum CfStatus {
  CfOk = 0,
  CfNullArgument = 1,
  CfInvalidUtf8 = 2,
  CfParseError = 3,
  CfValidationError = 4,
  CfComputationError = 5,
  CfIoError = 6,
  CfIndexOutOfRange = 7,
  CfPanic = 8,
} CfStatus;

// Model variant selector.
typedef enum CfVariant {
  CfVariantRescaled = 0,
  CfVariantLog = 1,
} CfVariant;

// Opaque corpus handle.
typedef struct CfCorpus CfCorpus;

// Opaque fit-results handle.
typedef struct CfResults CfResults;

// One fit-result row in flat C layout. `t` is -1 for subset-level skip
// entries; coefficient slots are meaningful only when `skipped` is 0,
// and the `b2/se2/p2` slots only when `has_early` is 1.
typedef struct CfFitRow {
  int32_t t;
  uint64_t n;
  int32_t skipped;
  int32_t has_early;
  double b0;
  double se0;
  double p0;
  double b1;
  double se1;
  double p1;
  double b2;
  double se2;
  double p2;
  double r2;
  double bp_stat;
  double bp_p;
} CfFitRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *cf_version(void);

// Returns a copy of the last error message raised on this thread, or
// NULL when none was recorded. Free it with `cf_string_free`.
char *cf_last_error_message(void);

// Frees a string returned by this library. NULL is accepted.
//
// # Safety
// `s` must be a pointer previously returned by this library and not
// freed since.
void cf_string_free(char *s);

// Parses a corpus CSV file into a new corpus handle.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum CfStatus cf_corpus_load_csv(const char *path, struct CfCorpus **out);

// Parses an in-memory corpus CSV buffer into a new corpus handle.
//
// # Safety
// `data` must point to `len` readable bytes; `out` must be valid.
enum CfStatus cf_corpus_parse(const uint8_t *data, uintptr_t len, struct CfCorpus **out);

// Generates a deterministic synthetic corpus. `fast_peak` selects the
// fast-peak accrual preset (nonzero) or the slow one (zero).
//
// # Safety
// `out` must be a valid pointer.
enum CfStatus cf_corpus_synth(uint64_t seed,
                              uintptr_t n_scs,
                              uintptr_t n_pubs,
                              int32_t fast_peak,
                              struct CfCorpus **out);

// Number of publications in the corpus; 0 on a NULL handle.
//
// # Safety
// `corpus` must be a live handle from this library or NULL.
uintptr_t cf_corpus_publication_count(const struct CfCorpus *corpus);

// Number of (publication, SC) observations after multi-category
// expansion; 0 on a NULL handle.
//
// # Safety
// `corpus` must be a live handle from this library or NULL.
uintptr_t cf_corpus_observation_count(const struct CfCorpus *corpus);

// Releases a corpus handle. NULL is accepted.
//
// # Safety
// `corpus` must be a live handle from this library or NULL.
void cf_corpus_free(struct CfCorpus *corpus);

// Runs the per-SC regression sweep of one variant over windows
// `t_min..=t_max` and returns a results handle. `workers` = 0 uses the
// default thread pool.
//
// # Safety
// `corpus` must be a live handle and `out` a valid pointer.
enum CfStatus cf_fit_sweep(const struct CfCorpus *corpus,
                           enum CfVariant variant,
                           uint32_t t_min,
                           uint32_t t_max,
                           uint32_t long_window,
                           uintptr_t sc_threshold,
                           uintptr_t workers,
                           struct CfResults **out);

// Number of rows in a results handle; 0 on NULL.
//
// # Safety
// `results` must be a live handle from this library or NULL.
uintptr_t cf_results_len(const struct CfResults *results);

// Copies row `idx` into `row`.
//
// # Safety
// `results` must be a live handle and `row` a valid pointer.
enum CfStatus cf_results_row(const struct CfResults *results, uintptr_t idx, struct CfFitRow *row);

// Subset label (SC code) of row `idx` as a fresh string, or NULL on a
// bad index. Free with `cf_string_free`.
//
// # Safety
// `results` must be a live handle from this library or NULL.
char *cf_results_subset(const struct CfResults *results, uintptr_t idx);

// Skip reason of row `idx`, or NULL when the row was fitted. Free with
// `cf_string_free`.
//
// # Safety
// `results` must be a live handle from this library or NULL.
char *cf_results_skip_reason(const struct CfResults *results, uintptr_t idx);

// Writes the results in the standard 20-column CSV layout.
//
// # Safety
// `results` must be a live handle; `path` a NUL-terminated string.
enum CfStatus cf_results_write_csv(const struct CfResults *results, const char *path);

// Releases a results handle. NULL is accepted.
//
// # Safety
// `results` must be a live handle from this library or NULL.
void cf_results_free(struct CfResults *results);

// The model prediction `b0 + b1*x + b2*y_t`.
double cf_predict(double b0, double b1, double b2, double x, double y_t);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CITEFORE_H */
