#ifndef HOPF_FUTAKI_H
#define HOPF_FUTAKI_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HfStatus {
  HF_STATUS_OK = 0,
  HF_STATUS_NULL_POINTER = 1,
  HF_STATUS_INVALID_UTF8 = 2,
  HF_STATUS_PARSE = 3,
  HF_STATUS_INVALID = 4,
  HF_STATUS_NOT_CERTIFIED = 5,
  HF_STATUS_NUMERICAL = 6,
  HF_STATUS_PANIC = 7,
} HfStatus;

typedef enum HfMethod {
  HF_METHOD_MC = 0,
  HF_METHOD_QMC = 1,
} HfMethod;

/**
 * Opaque normal-form contraction.
 */
typedef struct HfManifold HfManifold;

/**
 * Opaque equivariant volume form.
 */
typedef struct HfVolume HfVolume;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *hf_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void hf_string_free(char *s);

/**
 * Parses and validates a manifold description.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum HfStatus hf_manifold_from_json(const char *json, struct HfManifold **out);

/**
 * # Safety
 * `m` must come from this library and not have been freed. NULL is ignored.
 */
void hf_manifold_free(struct HfManifold *m);

/**
 * Complex dimension, or 0 for NULL.
 *
 * # Safety
 * `m` must be NULL or a live handle.
 */
size_t hf_manifold_dim(const struct HfManifold *m);

/**
 * Manifold description as JSON.
 *
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum HfStatus hf_manifold_to_json(const struct HfManifold *m, char **out);

/**
 * JSON array of invariant polynomial fields, each a list of terms.
 *
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum HfStatus hf_invariant_fields_json(const struct HfManifold *m, char **out);

/**
 * Smallest grid `t` for which the `d_t`-conjugate certifies the shell.
 * Writes `t` and a new handle for the conjugated map.
 *
 * # Safety
 * `m` must be a live handle; `out_t` and `out_map` must be writable.
 */
enum HfStatus hf_manifold_autotune(const struct HfManifold *m,
                                   double c,
                                   double outer_radius,
                                   double *out_t,
                                   struct HfManifold **out_map);

/**
 * Equivariant volume for a map that certifies the shell as given.
 *
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum HfStatus hf_volume_new(const struct HfManifold *m,
                            double c,
                            double outer_radius,
                            struct HfVolume **out);

/**
 * # Safety
 * `v` must come from this library and not have been freed. NULL is ignored.
 */
void hf_volume_free(struct HfVolume *v);

/**
 * Density at the point with coordinates `re[i] + i·im[i]`.
 *
 * # Safety
 * `v` must be a live handle; `re` and `im` must point to `n` doubles;
 * `out` must be writable.
 */
enum HfStatus hf_volume_eval(const struct HfVolume *v,
                             const double *re,
                             const double *im,
                             size_t n,
                             double *out);

/**
 * Futaki estimates for every invariant field, as a JSON object. The map is
 * conjugated first when it does not certify the shell.
 *
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum HfStatus hf_futaki_json(const struct HfManifold *m,
                             double c,
                             double outer_radius,
                             uint64_t samples,
                             uint64_t seed,
                             enum HfMethod method,
                             char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOPF_FUTAKI_H */
