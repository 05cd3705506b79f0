/* C interface to the incidence lab. Handles are opaque; every function returning LabStatus reports failures through lab_last_error. */

#pragma once

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum LabStatus {
  LAB_STATUS_OK = 0,
  LAB_STATUS_NULL_POINTER = 1,
  LAB_STATUS_INVALID_ARGUMENT = 2,
  LAB_STATUS_BUDGET_EXCEEDED = 3,
  LAB_STATUS_HYPOTHESES_NOT_MET = 4,
  LAB_STATUS_UNSUPPORTED = 5,
  /**
   * A verification ran to completion and found a violated bound.
   */
  LAB_STATUS_BOUND_VIOLATED = 6,
  LAB_STATUS_INTERNAL_ERROR = 7,
} LabStatus;

/**
 * Opaque field handle.
 */
typedef struct LabField LabField;

/**
 * Opaque polynomial-space handle.
 */
typedef struct LabSpace LabSpace;

/**
 * Opaque spectrum handle: eigenvalue data plus the prediction verdict when
 * the space satisfies the star condition.
 */
typedef struct LabSpectrum LabSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *lab_last_error(void);

/**
 * Builds GF(p^s) with its built-in modulus (p ≤ 13, s ≤ 4).
 *
 * # Safety
 * `out` must be a valid pointer to a `LabField*` slot.
 */
enum LabStatus lab_field_new(uint32_t p, uint32_t s, struct LabField **out);

/**
 * Builds GF(p^s) from `len` modulus coefficients, constant term first.
 *
 * # Safety
 * `coeffs` must point to `len` readable `uint32_t`; `out` as above.
 */
enum LabStatus lab_field_with_modulus(uint32_t p,
                                      uint32_t s,
                                      const uint32_t *coeffs,
                                      uintptr_t len,
                                      struct LabField **out);

/**
 * Field order q, or 0 for a null handle.
 *
 * # Safety
 * `field` must be null or a live handle from `lab_field_new`.
 */
uint64_t lab_field_order(const struct LabField *field);

/**
 * # Safety
 * `field` must be a handle from `lab_field_new`, not yet freed.
 */
void lab_field_free(struct LabField *field);

/**
 * Builds a polynomial space over the field from a support descriptor:
 * `"full:m,r"`, `"x1-shifted:m,r"`, or `{"m":…,"exponents":[[…]]}`.
 *
 * # Safety
 * `field` must be a live field handle; `descriptor` a NUL-terminated
 * string; `out` a valid slot.
 */
enum LabStatus lab_space_new(const struct LabField *field,
                             const char *descriptor,
                             struct LabSpace **out);

/**
 * # Safety
 * `space` must be null or a live space handle.
 */
uint32_t lab_space_dim(const struct LabSpace *space);

/**
 * # Safety
 * `space` must be null or a live space handle.
 */
uint64_t lab_space_size(const struct LabSpace *space);

/**
 * 1 when the star condition holds, 0 when it fails, -1 for null.
 *
 * # Safety
 * `space` must be null or a live space handle.
 */
int32_t lab_space_has_star(const struct LabSpace *space);

/**
 * Human-readable space summary; free with `lab_string_free`.
 *
 * # Safety
 * `space` must be a live space handle; `out` a valid slot.
 */
enum LabStatus lab_space_describe(const struct LabSpace *space, char **out);

/**
 * # Safety
 * `space` must be a handle from `lab_space_new`, not yet freed.
 */
void lab_space_free(struct LabSpace *space);

/**
 * Computes the incidence-graph spectrum of the space. When the star
 * condition holds, the handle also carries the exact comparison against the
 * predicted three-eigenvalue multiset.
 *
 * # Safety
 * `space` must be a live space handle; `out` a valid slot.
 */
enum LabStatus lab_spectrum_compute(const struct LabSpace *space, struct LabSpectrum **out);

/**
 * Largest non-trivial eigenvalue in absolute value; NaN for null.
 *
 * # Safety
 * `spectrum` must be null or a live spectrum handle.
 */
double lab_spectrum_lambda(const struct LabSpectrum *spectrum);

/**
 * Number of distinct eigenvalues.
 *
 * # Safety
 * `spectrum` must be null or a live spectrum handle.
 */
uintptr_t lab_spectrum_distinct_count(const struct LabSpectrum *spectrum);

/**
 * Distinct eigenvalue `index` as (re, im) with its multiplicity.
 *
 * # Safety
 * `spectrum` must be a live handle; the three output pointers must be
 * valid or null (null outputs are skipped).
 */
enum LabStatus lab_spectrum_entry(const struct LabSpectrum *spectrum,
                                  uintptr_t index,
                                  double *out_re,
                                  double *out_im,
                                  uint64_t *out_multiplicity);

/**
 * 1 when the computed multiset and eigencharacters match the prediction,
 * 0 when they deviate, -1 when no prediction applies (no star condition).
 *
 * # Safety
 * `spectrum` must be null or a live spectrum handle.
 */
int32_t lab_spectrum_matches_prediction(const struct LabSpectrum *spectrum);

/**
 * # Safety
 * `spectrum` must be a handle from `lab_spectrum_compute`, not yet freed.
 */
void lab_spectrum_free(struct LabSpectrum *spectrum);

/**
 * Runs verification suites from an experiment config (JSON, same schema as
 * the CLI) or the built-in default grid when `config_json` is null. Writes
 * the JSON-lines report to `out_report`. Returns Ok when every verdict
 * holds and BoundViolated when some bound fails.
 *
 * # Safety
 * `config_json` must be null or a NUL-terminated string; `out_report` a
 * valid slot. Free the report with `lab_string_free`.
 */
enum LabStatus lab_verify(const char *config_json, char **out_report);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void lab_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
