#ifndef SCHEMAFORGE_H
#define SCHEMAFORGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum SfStatus {
  SF_STATUS_OK = 0,
  SF_STATUS_NULL_ARGUMENT = 1,
  SF_STATUS_INVALID_UTF8 = 2,
  /**
   * Input text could not be parsed (schema JSON, FD problem).
   */
  SF_STATUS_PARSE_ERROR = 3,
  /**
   * The schema violates a structural rule.
   */
  SF_STATUS_INVALID_SCHEMA = 4,
  /**
   * A numeric argument is out of range.
   */
  SF_STATUS_INVALID_ARGUMENT = 5,
  /**
   * SQLite or another engine failed.
   */
  SF_STATUS_ENGINE_ERROR = 6,
  SF_STATUS_PANIC = 99,
} SfStatus;

/**
 * Opaque schema handle.
 */
typedef struct SfSchema SfSchema;

/**
 * Evaluation metrics, each in [0, 1].
 */
typedef struct SfMetrics {
  double table_f1;
  double table_acc;
  double attr_f1;
  double attr_acc;
  double pk_acc;
  double fk_acc;
  double dt_acc;
} SfMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static string.
 */
const char *sf_version(void);

/**
 * Message of the last failure on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *sf_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void sf_string_free(char *s);

/**
 * Parses canonical schema JSON. The schema is not required to be valid;
 * see [`sf_schema_validate`].
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum SfStatus sf_schema_from_json(const char *json, struct SfSchema **out);

/**
 * # Safety
 * `s` must be null or a handle from [`sf_schema_from_json`], not yet freed.
 */
void sf_schema_free(struct SfSchema *s);

/**
 * Canonical JSON of a valid schema.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum SfStatus sf_schema_to_json(const struct SfSchema *s, char **out);

/**
 * Writes whether the schema is valid to `out_ok`. When `out_report` is not
 * null it receives the violation report (empty when valid).
 *
 * # Safety
 * `s` must be a live handle; `out_ok` must be writable; `out_report` may be null.
 */
enum SfStatus sf_schema_validate(const struct SfSchema *s, bool *out_ok, char **out_report);

/**
 * SQLite DDL for a valid schema.
 *
 * # Safety
 * `s` must be a live handle; `out_sql` must be writable.
 */
enum SfStatus sf_schema_emit_ddl(const struct SfSchema *s, char **out_sql);

/**
 * Emits the DDL and executes it on an in-memory SQLite database. A script
 * that fails to execute is not an error: `out_ok` is false and the
 * diagnostic is available from [`sf_last_error`].
 *
 * # Safety
 * `s` must be a live handle; `out_ok` must be writable.
 */
enum SfStatus sf_schema_verify_ddl(const struct SfSchema *s, bool *out_ok);

/**
 * Analyses an FD problem (`universe: A B C` then one `X, Y -> Z` per
 * line) and returns JSON with `candidate_keys`, `minimal_cover`,
 * `fragments`, `lossless` and `dependency_preserving`.
 *
 * # Safety
 * `problem` must be a NUL-terminated string; `out_json` must be writable.
 */
enum SfStatus sf_normalize_fd_problem(const char *problem, char **out_json);

/**
 * Scores `pred` against `gold`. `string_only` disables the bundled
 * synonym and similarity providers.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum SfStatus sf_evaluate(const struct SfSchema *gold,
                          const struct SfSchema *pred,
                          double delta0,
                          double delta1,
                          bool string_only,
                          struct SfMetrics *out);

/**
 * Name-matching rule used by the evaluator.
 *
 * # Safety
 * `predicted` and `gold` must be NUL-terminated strings; `out` must be writable.
 */
enum SfStatus sf_names_match(const char *predicted,
                             const char *gold,
                             double delta0,
                             double delta1,
                             bool string_only,
                             bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCHEMAFORGE_H */
