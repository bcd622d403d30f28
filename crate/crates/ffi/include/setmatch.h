#ifndef SETMATCH_H
#define SETMATCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum SmStatus {
  SM_STATUS_OK = 0,
  SM_STATUS_NULL_ARGUMENT = 1,
  SM_STATUS_INVALID_UTF8 = 2,
  SM_STATUS_PARSE = 3,
  SM_STATUS_BUILD = 4,
  SM_STATUS_JSON = 5,
  SM_STATUS_EVALUATION = 6,
  SM_STATUS_OUT_OF_RANGE = 7,
  SM_STATUS_INVALID_ARGUMENT = 8,
  SM_STATUS_PANIC = 9,
} SmStatus;

typedef enum SmLabel {
  SM_LABEL_RIGHTMOST = 0,
  SM_LABEL_LEFTMOST = 1,
} SmLabel;

typedef enum SmStrategy {
  SM_STRATEGY_DEPTH_FIRST = 0,
  SM_STRATEGY_BREADTH_FIRST = 1,
  SM_STRATEGY_PARALLEL = 2,
} SmStrategy;

/**
 * A compiled set automaton.
 */
typedef struct SmAutomaton SmAutomaton;

/**
 * The matches found in one subject.
 */
typedef struct SmMatches SmMatches;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null after a
 * successful call. Valid until the next call into this library.
 */
const char *sm_last_error(void);

/**
 * Library version as a static string.
 */
const char *sm_version(void);

/**
 * Compiles newline-separated patterns. `signature` holds `name/arity` lines
 * and may be null to infer symbols from the patterns.
 *
 * # Safety
 * String arguments must be null or NUL-terminated; `out` must be writable.
 */
enum SmStatus sm_automaton_compile(const char *patterns,
                                   const char *signature,
                                   enum SmLabel label,
                                   struct SmAutomaton **out);

/**
 * Loads an automaton from its JSON form.
 *
 * # Safety
 * `json` must be null or NUL-terminated; `out` must be writable.
 */
enum SmStatus sm_automaton_from_json(const char *json, struct SmAutomaton **out);

/**
 * Writes the JSON form of `automaton` to `out`; release it with
 * [`sm_string_free`].
 *
 * # Safety
 * `automaton` must be a live handle; `out` must be writable.
 */
enum SmStatus sm_automaton_to_json(const struct SmAutomaton *automaton, char **out);

/**
 * Number of states, or 0 for a null handle.
 *
 * # Safety
 * `automaton` must be null or a live handle.
 */
size_t sm_automaton_state_count(const struct SmAutomaton *automaton);

/**
 * Finds every match in `subject`. `workers` is used only by the parallel
 * strategy and must be at least 1 there.
 *
 * # Safety
 * `automaton` must be a live handle, `subject` NUL-terminated and `out`
 * writable.
 */
enum SmStatus sm_automaton_match(const struct SmAutomaton *automaton,
                                 const char *subject,
                                 enum SmStrategy strategy,
                                 uint32_t workers,
                                 struct SmMatches **out);

/**
 * Number of matches, or 0 for a null handle.
 *
 * # Safety
 * `matches` must be null or a live handle.
 */
size_t sm_matches_len(const struct SmMatches *matches);

/**
 * Subject positions inspected while matching.
 *
 * # Safety
 * `matches` must be null or a live handle.
 */
size_t sm_matches_inspections(const struct SmMatches *matches);

/**
 * Match `index` in sorted order: the 0-based pattern index and the position
 * in dotted form (`ε` for the root). The string is owned by `matches`.
 *
 * # Safety
 * `matches` must be a live handle; the out pointers must be writable.
 */
enum SmStatus sm_matches_get(const struct SmMatches *matches,
                             size_t index,
                             uint32_t *pattern,
                             const char **position);

/**
 * # Safety
 * `automaton` must be null or a handle not yet freed.
 */
void sm_automaton_free(struct SmAutomaton *automaton);

/**
 * # Safety
 * `matches` must be null or a handle not yet freed.
 */
void sm_matches_free(struct SmMatches *matches);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string from [`sm_automaton_to_json`] not yet freed.
 */
void sm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SETMATCH_H */
