#ifndef DISCLAB_H
#define DISCLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DisclabStatus {
  DISCLAB_STATUS_OK = 0,
  DISCLAB_STATUS_NULL_POINTER = 1,
  DISCLAB_STATUS_PARAMETER = 2,
  DISCLAB_STATUS_CONVERGENCE = 3,
  DISCLAB_STATUS_IO = 4,
  DISCLAB_STATUS_PARSE = 5,
  DISCLAB_STATUS_PANIC = 6,
} DisclabStatus;

/**
 * Opaque ±1 coloring handle.
 */
typedef struct DisclabColoring DisclabColoring;

/**
 * Opaque hypergraph handle.
 */
typedef struct DisclabHypergraph DisclabHypergraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL.  The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *disclab_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *disclab_version(void);

/**
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum DisclabStatus disclab_generate_h1(size_t n,
                                       size_t m,
                                       size_t t,
                                       uint64_t seed,
                                       struct DisclabHypergraph **out);

/**
 * Even-row Bernoulli(1/2) hypergraph.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum DisclabStatus disclab_generate_h2_even(size_t n,
                                            size_t m,
                                            uint64_t seed,
                                            struct DisclabHypergraph **out);

/**
 * Parses the text format (`n m` header, then `k v1 .. vk` per edge).
 *
 * # Safety
 * `text` must be NUL-terminated; `out` a valid handle slot.
 */
enum DisclabStatus disclab_hypergraph_from_text(const char *text, struct DisclabHypergraph **out);

/**
 * # Safety
 * `path` must be NUL-terminated; `out` a valid handle slot.
 */
enum DisclabStatus disclab_hypergraph_load(const char *path, struct DisclabHypergraph **out);

/**
 * # Safety
 * `h` must come from this library and not be freed twice.  NULL is a no-op.
 */
void disclab_hypergraph_free(struct DisclabHypergraph *h);

/**
 * Vertex count; 0 for NULL.
 *
 * # Safety
 * `h` must be NULL or a live handle.
 */
size_t disclab_hypergraph_n(const struct DisclabHypergraph *h);

/**
 * Edge count; 0 for NULL.
 *
 * # Safety
 * `h` must be NULL or a live handle.
 */
size_t disclab_hypergraph_m(const struct DisclabHypergraph *h);

/**
 * Borrows edge `i` as a sorted id array owned by the handle.
 *
 * # Safety
 * `h` must be a live handle; `ids` and `len` valid pointers.
 */
enum DisclabStatus disclab_hypergraph_edge(const struct DisclabHypergraph *h,
                                           size_t i,
                                           const uint32_t **ids,
                                           size_t *len);

/**
 * Two-stage coloring.  `t = 0` uses the max degree; `practical != 0`
 * selects the practical preset, otherwise the theoretical defaults.
 *
 * # Safety
 * `h` must be a live handle; `out` a valid handle slot.
 */
enum DisclabStatus disclab_color_two_stage(const struct DisclabHypergraph *h,
                                           size_t t,
                                           uint64_t seed,
                                           int32_t practical,
                                           struct DisclabColoring **out);

/**
 * # Safety
 * `h` must be a live handle; `out` a valid handle slot.
 */
enum DisclabStatus disclab_beck_fiala(const struct DisclabHypergraph *h,
                                      struct DisclabColoring **out);

/**
 * Exact discrepancy by enumeration; refuses n > `cap`.
 *
 * # Safety
 * `h` must be a live handle; `disc` valid; `out` NULL or a valid slot.
 */
enum DisclabStatus disclab_brute_force(const struct DisclabHypergraph *h,
                                       size_t cap,
                                       uint64_t *disc,
                                       struct DisclabColoring **out);

/**
 * # Safety
 * `c` must be NULL or a live handle.
 */
size_t disclab_coloring_len(const struct DisclabColoring *c);

/**
 * Copies the ±1 values into `buf`, which must hold `len` entries.
 *
 * # Safety
 * `c` must be a live handle and `buf` writable for `len` bytes.
 */
enum DisclabStatus disclab_coloring_values(const struct DisclabColoring *c,
                                           int8_t *buf,
                                           size_t len);

/**
 * # Safety
 * `c` must come from this library and not be freed twice.  NULL is a no-op.
 */
void disclab_coloring_free(struct DisclabColoring *c);

/**
 * max_e |Σ_{v∈e} values[v]| for a caller-supplied ±1 array.
 *
 * # Safety
 * `h` must be a live handle, `values` readable for `len` bytes, `disc`
 * writable.
 */
enum DisclabStatus disclab_disc(const struct DisclabHypergraph *h,
                                const int8_t *values,
                                size_t len,
                                uint64_t *disc);

/**
 * Largest singular value of the incidence matrix on 1^⊥.  `t = 0` uses
 * the max degree for the reported constant.
 *
 * # Safety
 * `h` must be a live handle; `sigma` and `converged` writable.
 */
enum DisclabStatus disclab_restricted_norm(const struct DisclabHypergraph *h,
                                           size_t t,
                                           double tol,
                                           size_t max_iters,
                                           uint64_t seed,
                                           double *sigma,
                                           int32_t *converged);

/**
 * Exact moment report as a JSON string (rationals as "p/q").  Release it
 * with `disclab_string_free`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum DisclabStatus disclab_moments_json(size_t n, size_t m, char **out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.  NULL is a no-op.
 */
void disclab_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DISCLAB_H */
