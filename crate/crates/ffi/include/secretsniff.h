/* C interface for the secretsniff leak-detection library. */

#ifndef SECRETSNIFF_H
#define SECRETSNIFF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes for every fallible call.
 */
typedef enum SniffStatus {
  SNIFF_STATUS_OK = 0,
  /**
   * A path could not be read or written.
   */
  SNIFF_STATUS_IO = 1,
  /**
   * Input could not be parsed (store, cache, or diff).
   */
  SNIFF_STATUS_PARSE = 2,
  /**
   * Inputs are inconsistent (e.g. pepper does not match the cache).
   */
  SNIFF_STATUS_CONFIG = 3,
  /**
   * A required pointer argument was NULL or not valid UTF-8.
   */
  SNIFF_STATUS_BAD_ARGUMENT = 4,
  /**
   * An internal panic was caught; this is a bug.
   */
  SNIFF_STATUS_INTERNAL = 5,
} SniffStatus;

/**
 * Which detection path produced a finding.
 */
typedef enum SniffRule {
  SNIFF_RULE_PATTERN = 0,
  SNIFF_RULE_HASH_TOKEN = 1,
} SniffRule;

/**
 * Loaded digest cache plus its pepper, ready to check revisions.
 */
typedef struct SniffChecker SniffChecker;

/**
 * Compiled pattern engine over a secret store.
 */
typedef struct SniffEngine SniffEngine;

/**
 * An owned, immutable list of findings.
 */
typedef struct SniffFindings SniffFindings;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. Borrowed; valid
 * until the next failing call on the same thread.
 */
const char *sniff_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sniff_version(void);

/**
 * Opens an engine from a secret store file. `pepper_hex` may be NULL; it
 * only affects correlation tags. On success writes a handle to `out`.
 *
 * # Safety
 * `secrets_path` (and `pepper_hex` when non-NULL) must point to
 * NUL-terminated strings; `out` must be a valid pointer.
 */
enum SniffStatus sniff_engine_open(const char *secrets_path,
                                   const char *pepper_hex,
                                   struct SniffEngine **out);

/**
 * Frees an engine handle. NULL is a no-op.
 *
 * # Safety
 * `engine` must be a pointer from [`sniff_engine_open`], not yet freed.
 */
void sniff_engine_close(struct SniffEngine *engine);

/**
 * Number of compiled patterns (secrets long enough to match).
 *
 * # Safety
 * `engine` must be a live handle from [`sniff_engine_open`] or NULL.
 */
size_t sniff_engine_pattern_count(const struct SniffEngine *engine);

/**
 * Scans a directory tree; writes a findings handle to `out`.
 *
 * # Safety
 * `engine` must be a live handle, `root` a NUL-terminated path, `out` a
 * valid pointer.
 */
enum SniffStatus sniff_engine_scan_tree(const struct SniffEngine *engine,
                                        const char *root,
                                        struct SniffFindings **out);

/**
 * Pattern-scans one in-memory buffer (reported under the pseudo-path
 * `<buffer>`); writes a findings handle to `out`.
 *
 * # Safety
 * `engine` must be a live handle; `data` must point to `len` readable
 * bytes (may be NULL only when `len == 0`); `out` must be valid.
 */
enum SniffStatus sniff_engine_scan_bytes(const struct SniffEngine *engine,
                                         const uint8_t *data,
                                         size_t len,
                                         struct SniffFindings **out);

/**
 * Opens a checker from a cache file and the matching pepper (64 hex
 * chars). Fails with `SniffStatusConfig` when they do not match.
 *
 * # Safety
 * `cache_path` and `pepper_hex` must be NUL-terminated strings; `out`
 * must be a valid pointer.
 */
enum SniffStatus sniff_checker_open(const char *cache_path,
                                    const char *pepper_hex,
                                    struct SniffChecker **out);

/**
 * Frees a checker handle. NULL is a no-op.
 *
 * # Safety
 * `checker` must be a pointer from [`sniff_checker_open`], not yet freed.
 */
void sniff_checker_close(struct SniffChecker *checker);

/**
 * Checks a unified diff (UTF-8 bytes) against the cache; writes a
 * findings handle to `out`.
 *
 * # Safety
 * `checker` must be a live handle; `diff` must point to `len` readable
 * bytes (NULL only when `len == 0`); `revision_id` must be a
 * NUL-terminated string; `out` must be valid.
 */
enum SniffStatus sniff_checker_check_diff(const struct SniffChecker *checker,
                                          const uint8_t *diff,
                                          size_t len,
                                          const char *revision_id,
                                          struct SniffFindings **out);

/**
 * Frees a findings handle. NULL is a no-op.
 *
 * # Safety
 * `findings` must be a handle returned by a scan/check call, not yet freed.
 */
void sniff_findings_free(struct SniffFindings *findings);

/**
 * Number of findings in the list (0 for NULL).
 *
 * # Safety
 * `findings` must be a live findings handle or NULL.
 */
size_t sniff_findings_len(const struct SniffFindings *findings);

/**
 * Secret id of finding `index`, or NULL when out of range. Borrowed from
 * the handle.
 *
 * # Safety
 * `findings` must be a live findings handle or NULL.
 */
const char *sniff_finding_secret_id(const struct SniffFindings *findings, size_t index);

/**
 * Path of finding `index`, or NULL when out of range.
 *
 * # Safety
 * `findings` must be a live findings handle or NULL.
 */
const char *sniff_finding_path(const struct SniffFindings *findings, size_t index);

/**
 * Redacted excerpt of finding `index`, or NULL when out of range.
 *
 * # Safety
 * `findings` must be a live findings handle or NULL.
 */
const char *sniff_finding_excerpt(const struct SniffFindings *findings, size_t index);

/**
 * Correlation tag of finding `index`, or NULL when out of range.
 *
 * # Safety
 * `findings` must be a live findings handle or NULL.
 */
const char *sniff_finding_correlation(const struct SniffFindings *findings, size_t index);

/**
 * 1-based line of finding `index` (0 when out of range).
 *
 * # Safety
 * `findings` must be a live findings handle or NULL.
 */
size_t sniff_finding_line(const struct SniffFindings *findings, size_t index);

/**
 * 1-based column of finding `index` (0 when out of range).
 *
 * # Safety
 * `findings` must be a live findings handle or NULL.
 */
size_t sniff_finding_column(const struct SniffFindings *findings, size_t index);

/**
 * Byte span start of finding `index` (0 when out of range).
 *
 * # Safety
 * `findings` must be a live findings handle or NULL.
 */
uint64_t sniff_finding_byte_start(const struct SniffFindings *findings, size_t index);

/**
 * Byte span end of finding `index` (0 when out of range).
 *
 * # Safety
 * `findings` must be a live findings handle or NULL.
 */
uint64_t sniff_finding_byte_end(const struct SniffFindings *findings, size_t index);

/**
 * Rule kind of finding `index` (pattern when out of range).
 *
 * # Safety
 * `findings` must be a live findings handle or NULL.
 */
enum SniffRule sniff_finding_rule(const struct SniffFindings *findings, size_t index);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SECRETSNIFF_H */
