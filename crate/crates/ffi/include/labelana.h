#ifndef LABELANA_H
#define LABELANA_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum LabelanaStatus {
  LABELANA_STATUS_OK = 0,
  LABELANA_STATUS_NULL_ARGUMENT = 1,
  LABELANA_STATUS_PARSE_ERROR = 2,
  LABELANA_STATUS_VALIDATION_ERROR = 3,
  LABELANA_STATUS_RESOURCE_ERROR = 4,
  LABELANA_STATUS_INVALID_UTF8 = 5,
  LABELANA_STATUS_INVALID_ARGUMENT = 6,
  LABELANA_STATUS_INTERNAL_ERROR = 70,
} LabelanaStatus;

typedef enum LabelanaQuestion {
  LABELANA_QUESTION_SIMPLE = 0,
  LABELANA_QUESTION_IH = 1,
  LABELANA_QUESTION_PURELY_INFINITE = 2,
  LABELANA_QUESTION_GAUGE_INVARIANT_IDEALS = 3,
  LABELANA_QUESTION_INFINITE_PROJECTION_EXISTS = 4,
} LabelanaQuestion;

typedef enum LabelanaVerdict {
  LABELANA_VERDICT_UNKNOWN = 0,
  LABELANA_VERDICT_CERTIFIED = 1,
  LABELANA_VERDICT_REFUTED = 2,
} LabelanaVerdict;

/**
 * Opaque analysis result.
 */
typedef struct LabelanaAnalysis LabelanaAnalysis;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and analyzes a graph description.
 *
 * `max_atoms` of 0 keeps the default budget. On success `*out` receives a
 * handle to free with `labelana_analysis_free`; on failure it is set to NULL.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LabelanaStatus labelana_analyze(const char *text,
                                     uint32_t max_atoms,
                                     struct LabelanaAnalysis **out);

/**
 * Frees a handle. NULL is ignored.
 *
 * # Safety
 * `handle` must come from `labelana_analyze` and not be used afterwards.
 */
void labelana_analysis_free(struct LabelanaAnalysis *handle);

/**
 * The full JSON report. Free the result with `labelana_string_free`.
 * Returns NULL if `handle` is NULL.
 *
 * # Safety
 * `handle` must be NULL or a live handle.
 */
char *labelana_report_json(const struct LabelanaAnalysis *handle);

/**
 * Writes the verdict for `q` to `*out`.
 *
 * # Safety
 * `handle` must be a live handle and `out` a valid pointer.
 */
enum LabelanaStatus labelana_verdict(const struct LabelanaAnalysis *handle,
                                     enum LabelanaQuestion q,
                                     enum LabelanaVerdict *out);

/**
 * Decision tag of the rule behind the verdict for `q`, e.g.
 * `"simple-iff-trivial-cores-and-l-e"`. Static storage; do not free.
 * Returns NULL if `handle` is NULL.
 *
 * # Safety
 * `handle` must be NULL or a live handle.
 */
const char *labelana_verdict_rule(const struct LabelanaAnalysis *handle, enum LabelanaQuestion q);

/**
 * Writes whether the space is disagreeable.
 *
 * # Safety
 * `handle` must be a live handle and `out` a valid pointer.
 */
enum LabelanaStatus labelana_is_disagreeable(const struct LabelanaAnalysis *handle, bool *out);

/**
 * Writes whether every quotient by a core is disagreeable.
 *
 * # Safety
 * `handle` must be a live handle and `out` a valid pointer.
 */
enum LabelanaStatus labelana_is_strongly_disagreeable(const struct LabelanaAnalysis *handle,
                                                      bool *out);

/**
 * Number of atoms, or 0 for a NULL handle.
 *
 * # Safety
 * `handle` must be NULL or a live handle.
 */
size_t labelana_atom_count(const struct LabelanaAnalysis *handle);

/**
 * Number of hereditary saturated cores, or 0 for a NULL handle.
 *
 * # Safety
 * `handle` must be NULL or a live handle.
 */
size_t labelana_core_count(const struct LabelanaAnalysis *handle);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void labelana_string_free(char *s);

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call into the library from the same thread.
 */
const char *labelana_last_error_message(void);

/**
 * Library version, static storage.
 */
const char *labelana_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LABELANA_H */
