#ifndef ACTORSEG_H
#define ACTORSEG_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ActorsegStatus {
  ACTORSEG_STATUS_OK = 0,
  ACTORSEG_STATUS_NULL_POINTER = 1,
  ACTORSEG_STATUS_INVALID_UTF8 = 2,
  ACTORSEG_STATUS_PARSE = 3,
  ACTORSEG_STATUS_SOLVE = 4,
  ACTORSEG_STATUS_EVAL = 5,
  ACTORSEG_STATUS_INVALID_ARGUMENT = 6,
  ACTORSEG_STATUS_PANIC = 7,
} ActorsegStatus;

/**
 * Parsed instance.
 */
typedef struct ActorsegInstance ActorsegInstance;

/**
 * Solver output. Keeps the label space so it can be serialized on its own.
 */
typedef struct ActorsegLabeling ActorsegLabeling;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null if none failed.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *actorseg_last_error(void);

/**
 * Parses instance text.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out_instance` writable.
 */
enum ActorsegStatus actorseg_instance_parse(const char *text,
                                            struct ActorsegInstance **out_instance);

/**
 * # Safety
 * `instance` must come from [`actorseg_instance_parse`] and not be freed twice.
 */
void actorseg_instance_free(struct ActorsegInstance *instance);

/**
 * Node count, or 0 for a null handle.
 *
 * # Safety
 * `instance` must be null or a live handle.
 */
size_t actorseg_instance_num_nodes(const struct ActorsegInstance *instance);

/**
 * Segments an instance.
 *
 * `model` is one of `nb`, `jps`, `cond`, `bilayer`, `trilayer`; `solver` is
 * `expansion`, `swap` or `brute`, and may be null for expansion.
 * `max_sweeps` of 0 keeps the default.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum ActorsegStatus actorseg_solve(const struct ActorsegInstance *instance,
                                   const char *model,
                                   bool label_costs,
                                   const char *solver,
                                   uint32_t max_sweeps,
                                   struct ActorsegLabeling **out_labeling);

/**
 * # Safety
 * `labeling` must come from [`actorseg_solve`] and not be freed twice.
 */
void actorseg_labeling_free(struct ActorsegLabeling *labeling);

/**
 * Number of labeled nodes, or 0 for a null handle.
 *
 * # Safety
 * `labeling` must be null or a live handle.
 */
size_t actorseg_labeling_len(const struct ActorsegLabeling *labeling);

/**
 * Total energy of the solved fields, or NaN for a null handle.
 *
 * # Safety
 * `labeling` must be null or a live handle.
 */
double actorseg_labeling_energy(const struct ActorsegLabeling *labeling);

/**
 * Actor and action index of one node. Background is reported as the number
 * of actors and the number of actions respectively.
 *
 * # Safety
 * `labeling` must be a live handle; outputs must be writable.
 */
enum ActorsegStatus actorseg_labeling_get(const struct ActorsegLabeling *labeling,
                                          size_t node,
                                          uint32_t *out_actor,
                                          uint32_t *out_action);

/**
 * Labeling file text. Release with [`actorseg_string_free`].
 *
 * # Safety
 * `labeling` must be a live handle and `out_text` writable.
 */
enum ActorsegStatus actorseg_labeling_serialize(const struct ActorsegLabeling *labeling,
                                                char **out_text);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void actorseg_string_free(char *s);

/**
 * Mean per-class tuple accuracy against the instance's ground truth.
 *
 * # Safety
 * Handles must be live and `out_mean` writable.
 */
enum ActorsegStatus actorseg_mean_class_accuracy(const struct ActorsegInstance *instance,
                                                 const struct ActorsegLabeling *labeling,
                                                 double *out_mean);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ACTORSEG_H */
