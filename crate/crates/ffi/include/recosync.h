#ifndef RECOSYNC_H
#define RECOSYNC_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RsStatus {
  RS_STATUS_OK = 0,
  RS_STATUS_NULL_ARGUMENT = 1,
  RS_STATUS_INVALID_UTF8 = 2,
  RS_STATUS_PARSE = 3,
  RS_STATUS_INPUT = 4,
  RS_STATUS_OUT_OF_RANGE = 5,
  RS_STATUS_TOO_MANY_STATES = 6,
  RS_STATUS_NO_WORD = 7,
  RS_STATUS_SIMULATION = 8,
  RS_STATUS_IO = 9,
} RsStatus;

typedef enum RsBlocking {
  RS_BLOCKING_RECOVERY_FREE = 0,
  RS_BLOCKING_CLASSICAL = 1,
} RsBlocking;

/**
 * Opaque model handle.
 */
typedef struct RsModel RsModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread. Valid until the next
 * call that fails.
 */
const char *rs_last_error(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void rs_string_free(char *s);

struct RsModel *rs_model_new(void);

/**
 * # Safety
 * `m` must come from `rs_model_new` and not have been freed.
 */
void rs_model_free(struct RsModel *m);

/**
 * Parses `.aut` text and appends its automata. `first` receives the index
 * of the first one and `count` how many were read.
 *
 * # Safety
 * `m` is a live handle, `aut` a NUL-terminated string, out-pointers null
 * or writable.
 */
enum RsStatus rs_model_load(struct RsModel *m, const char *aut, size_t *first, size_t *count);

/**
 * # Safety
 * `m` is a live handle.
 */
size_t rs_model_len(const struct RsModel *m);

/**
 * Index of the last automaton called `name`, or -1.
 *
 * # Safety
 * `m` is a live handle, `name` a NUL-terminated string.
 */
ptrdiff_t rs_model_find(const struct RsModel *m, const char *name);

/**
 * Registers an event. `class` is one of 'c', 'u', 'r'.
 *
 * # Safety
 * `m` is a live handle, `name` a NUL-terminated string.
 */
enum RsStatus rs_model_register_event(struct RsModel *m, const char *name, char class_);

/**
 * # Safety
 * `m` is a live handle, out-pointers null or writable.
 */
enum RsStatus rs_model_size(const struct RsModel *m,
                            size_t index,
                            size_t *states,
                            size_t *transitions);

/**
 * Serializes one automaton in `.aut` form, event table first.
 *
 * # Safety
 * `m` is a live handle, `out` writable.
 */
enum RsStatus rs_model_serialize(const struct RsModel *m, size_t index, char **out);

/**
 * Synchronous product of the listed automata.
 *
 * # Safety
 * `m` is a live handle, `idx` points to `n` indices, `out` null or writable.
 */
enum RsStatus rs_model_parallel(struct RsModel *m, const size_t *idx, size_t n, size_t *out);

/**
 * Adds recovery event `event` to automaton `index`. The event is
 * registered as a recovery event when unknown.
 *
 * # Safety
 * `m` is a live handle, `event` a NUL-terminated string, `out` null or
 * writable.
 */
enum RsStatus rs_model_make_recoverable(struct RsModel *m,
                                        size_t index,
                                        const char *event,
                                        size_t *out);

/**
 * Shortest synchronizing word of automaton `index` (exact search up to
 * `bound` states), or a greedy one when `greedy` is non-zero. With
 * `to_initial` non-zero the word must end in the initial state. Returns
 * `NoWord` when none exists.
 *
 * # Safety
 * `m` is a live handle, `out` writable.
 */
enum RsStatus rs_model_syncword(const struct RsModel *m,
                                size_t index,
                                int32_t to_initial,
                                int32_t greedy,
                                size_t bound,
                                char **out);

/**
 * Local modular synthesis, one supervisor per specification (monolithic
 * when `monolithic` is non-zero). Supervisors are appended; `first` and
 * `count` locate them and `nonconflicting` receives the verdict (1 or 0).
 *
 * # Safety
 * `m` is a live handle, index arrays hold the stated number of entries,
 * out-pointers null or writable.
 */
enum RsStatus rs_model_synth(struct RsModel *m,
                             const size_t *plants,
                             size_t n_plants,
                             const size_t *specs,
                             size_t n_specs,
                             int32_t monolithic,
                             enum RsBlocking blocking,
                             size_t *first,
                             size_t *count,
                             int32_t *nonconflicting);

/**
 * Synthesizes local modular supervisors for the given plants and
 * specifications and runs a `.scn` scenario against them. `checks` and
 * `failures` receive the counts; `transcript` (optional) the run log.
 *
 * # Safety
 * `m` is a live handle, index arrays hold the stated number of entries,
 * `scenario` a NUL-terminated string, out-pointers null or writable.
 */
enum RsStatus rs_model_simulate(const struct RsModel *m,
                                const size_t *plants,
                                size_t n_plants,
                                const size_t *specs,
                                size_t n_specs,
                                enum RsBlocking blocking,
                                const char *scenario,
                                size_t *checks,
                                size_t *failures,
                                char **transcript);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RECOSYNC_H */
