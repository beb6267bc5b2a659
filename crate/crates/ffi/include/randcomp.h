#ifndef RANDCOMP_H
#define RANDCOMP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by fallible functions.
 */
typedef enum RcStatus {
  RC_OK = 0,
  RC_NULL_POINTER = 1,
  RC_INVALID_ARGUMENT = 2,
  RC_SYNTAX = 3,
  RC_UNSUPPORTED = 4,
  RC_GUARD_EXCEEDED = 5,
  RC_BUFFER_TOO_SMALL = 6,
  RC_PANIC = 7,
} RcStatus;

/**
 * Opaque composition handle.
 */
typedef struct RcComposition RcComposition;

/**
 * Opaque parsed pattern handle.
 */
typedef struct RcPattern RcPattern;

/**
 * Opaque random stream handle.
 */
typedef struct RcRng RcRng;

/**
 * Result of matching a pattern.
 */
typedef struct RcMatch {
  /**
   * Occurrence count, saturating at `UINT64_MAX`.
   */
  uint64_t count;
  bool exists;
  /**
   * The ordering search stopped at its cap; `count` is a lower bound.
   */
  bool truncated;
} RcMatch;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last error on this thread; empty after a success. The
 * pointer stays valid until the next call on the same thread.
 */
const char *rc_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *rc_version(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void rc_string_free(char *s);

/**
 * Parses a comma-separated or digit-string composition.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum RcStatus rc_composition_parse(const char *text_ptr, struct RcComposition **out);

/**
 * Builds a composition from `len` terms.
 *
 * # Safety
 * `terms` must point to `len` readable values; `out` must be writable.
 */
enum RcStatus rc_composition_from_terms(const uint64_t *terms,
                                        size_t len,
                                        struct RcComposition **out);

/**
 * # Safety
 * `c` must come from this library and not be freed twice.
 */
void rc_composition_free(struct RcComposition *c);

/**
 * Number of terms, or 0 for a null handle.
 *
 * # Safety
 * `c` must be null or a live handle.
 */
size_t rc_composition_len(const struct RcComposition *c);

/**
 * Sum of the terms, or 0 for a null handle.
 *
 * # Safety
 * `c` must be null or a live handle.
 */
uint64_t rc_composition_size(const struct RcComposition *c);

/**
 * Copies the terms into `buf`, which must hold `rc_composition_len(c)`
 * values.
 *
 * # Safety
 * `c` must be a live handle and `buf` must hold `cap` writable values.
 */
enum RcStatus rc_composition_terms(const struct RcComposition *c, uint64_t *buf, size_t cap);

/**
 * Statistics report as a JSON string, or null on a null handle.
 *
 * # Safety
 * `c` must be null or a live handle.
 */
char *rc_composition_stats_json(const struct RcComposition *c);

/**
 * A random stream keyed by `(seed, stream_index)`.
 */
struct RcRng *rc_rng_new(uint64_t seed, uint64_t stream_index);

/**
 * # Safety
 * `rng` must come from this library and not be freed twice.
 */
void rc_rng_free(struct RcRng *rng);

/**
 * Uniform `n`-composition of `m`.
 *
 * # Safety
 * `rng` must be a live handle not used concurrently; `out` writable.
 */
enum RcStatus rc_sample_uniform(size_t n,
                                uint64_t m,
                                struct RcRng *rng,
                                struct RcComposition **out);

/**
 * `n` i.i.d. geometric terms with `P(term >= k) = p^k`.
 *
 * # Safety
 * `rng` must be a live handle not used concurrently; `out` writable.
 */
enum RcStatus rc_sample_geometric(size_t n,
                                  double p,
                                  struct RcRng *rng,
                                  struct RcComposition **out);

/**
 * One step of the evolutionary chain, in place; writes the 0-based index
 * of the grown term to `grown` when it is not null.
 *
 * # Safety
 * `c` and `rng` must be live handles; `grown` null or writable.
 */
enum RcStatus rc_evolve_step(struct RcComposition *c, struct RcRng *rng, size_t *grown);

/**
 * Parses a pattern in the `kind:terms` syntax.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum RcStatus rc_pattern_parse(const char *text_ptr, struct RcPattern **out);

/**
 * # Safety
 * `p` must come from this library and not be freed twice.
 */
void rc_pattern_free(struct RcPattern *p);

/**
 * Counts occurrences of `pattern` in `c`.
 *
 * # Safety
 * `c` and `pattern` must be live handles; `out` writable.
 */
enum RcStatus rc_match(const struct RcComposition *c,
                       const struct RcPattern *pattern,
                       bool strict_gaps,
                       struct RcMatch *out);

/**
 * Exact `P(contains pattern)` under the uniform model, by enumeration.
 *
 * # Safety
 * `pattern` must be a live handle; `out` writable.
 */
enum RcStatus rc_oracle_uniform(uint64_t n,
                                uint64_t m,
                                const struct RcPattern *pattern,
                                bool strict_gaps,
                                double *out);

/**
 * Certified interval for `P(contains pattern)` under the geometric model.
 *
 * # Safety
 * `pattern` must be a live handle; `lo` and `hi` writable.
 */
enum RcStatus rc_oracle_geometric(uint64_t n,
                                  double p,
                                  const struct RcPattern *pattern,
                                  bool strict_gaps,
                                  double *lo,
                                  double *hi);

/**
 * Limiting Poisson probability for statistic `id` with parameter `k`
 * (ignored when 0) at scale constant `alpha`.
 *
 * # Safety
 * `id` must be a NUL-terminated string; `out` writable.
 */
enum RcStatus rc_theory_poisson(const char *id, uint64_t k, double alpha, double *out);

/**
 * `binom(m+n-1, m)` in decimal, or null when `n = 0`.
 */
char *rc_count_compositions(uint64_t n, uint64_t m);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RANDCOMP_H */
