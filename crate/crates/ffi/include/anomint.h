#ifndef ANOMINT_H
#define ANOMINT_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AnomintStatus {
  ANOMINT_STATUS_OK = 0,
  ANOMINT_STATUS_NULL_POINTER = 1,
  ANOMINT_STATUS_INVALID_ARGUMENT = 2,
  ANOMINT_STATUS_NOT_ANTISYMMETRIC = 3,
  ANOMINT_STATUS_ODD_DIMENSION = 4,
  ANOMINT_STATUS_SINGULAR_CHARGES = 5,
  ANOMINT_STATUS_PARSE = 6,
  ANOMINT_STATUS_OVERFLOW = 7,
  ANOMINT_STATUS_BUFFER_TOO_SMALL = 8,
  ANOMINT_STATUS_PANIC = 9,
} AnomintStatus;

typedef enum AnomintNormalization {
  /**
   * Level spacing `2|β|`.
   */
  ANOMINT_NORMALIZATION_ORACLE = 0,
  /**
   * Level spacing `β²`.
   */
  ANOMINT_NORMALIZATION_PAPER = 1,
} AnomintNormalization;

typedef enum AnomintGroup {
  /**
   * Even sign changes: the Weyl group of `SO(2l)`.
   */
  ANOMINT_GROUP_D = 0,
  /**
   * All sign changes.
   */
  ANOMINT_GROUP_B = 1,
} AnomintGroup;

typedef struct AnomintCanonical AnomintCanonical;

typedef struct AnomintCharges AnomintCharges;

typedef struct AnomintSpectrum AnomintSpectrum;

/**
 * One spectrum level. The exact energy is `energy_num / energy_den`.
 */
typedef struct AnomintLevel {
  double energy;
  int64_t energy_num;
  int64_t energy_den;
  uint64_t degeneracy;
} AnomintLevel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call into this library on the same thread.
 */
const char *anomint_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *anomint_version(void);

/**
 * Builds charges from `n × n` row-major rationals `num[k] / den[k]`.
 *
 * # Safety
 * `num` and `den` must each point to `n * n` readable values; `out` must be
 * writable.
 */
enum AnomintStatus anomint_charges_new(size_t n,
                                       const int64_t *num,
                                       const int64_t *den,
                                       struct AnomintCharges **out);

/**
 * Parses a charge file (`{"n": .., "alpha": ..}`) from a JSON string.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum AnomintStatus anomint_charges_from_json(const char *json, struct AnomintCharges **out);

/**
 * # Safety
 * `charges` must be null or a handle from this library not yet freed.
 */
void anomint_charges_free(struct AnomintCharges *charges);

/**
 * Number of generators, or 0 for a null handle.
 *
 * # Safety
 * `charges` must be null or a live handle.
 */
size_t anomint_charges_n(const struct AnomintCharges *charges);

/**
 * Runs the exact commutator identity suite; `all_zero` receives whether
 * every residual vanishes.
 *
 * # Safety
 * `charges` must be a live handle; `all_zero` must be writable.
 */
enum AnomintStatus anomint_verify_identities(const struct AnomintCharges *charges, bool *all_zero);

/**
 * Brings the charges to Cartan block form. `tol` is the singularity
 * threshold relative to the largest entry.
 *
 * # Safety
 * `charges` must be a live handle; `out` must be writable.
 */
enum AnomintStatus anomint_canonicalize(const struct AnomintCharges *charges,
                                        double tol,
                                        struct AnomintCanonical **out);

/**
 * # Safety
 * `form` must be null or a handle from this library not yet freed.
 */
void anomint_canonical_free(struct AnomintCanonical *form);

/**
 * Number of frequency pairs `l`, or 0 for a null handle.
 *
 * # Safety
 * `form` must be null or a live handle.
 */
size_t anomint_canonical_l(const struct AnomintCanonical *form);

/**
 * Determinant of `M` (±1), or 0 for a null handle.
 *
 * # Safety
 * `form` must be null or a live handle.
 */
int32_t anomint_canonical_det(const struct AnomintCanonical *form);

/**
 * Copies the `l` positive frequencies, descending.
 *
 * # Safety
 * `form` must be a live handle; `buf` must hold `cap` doubles.
 */
enum AnomintStatus anomint_canonical_beta(const struct AnomintCanonical *form,
                                          double *buf,
                                          size_t cap);

/**
 * Copies the orthogonal `2l × 2l` matrix `M` (row-major) with
 * `M A Mᵀ = C`.
 *
 * # Safety
 * `form` must be a live handle; `buf` must hold `cap` doubles.
 */
enum AnomintStatus anomint_canonical_matrix(const struct AnomintCanonical *form,
                                            double *buf,
                                            size_t cap);

/**
 * Enumerates all levels up to `E_max = emax_num / emax_den` for exact
 * frequencies `beta_num[k] / beta_den[k]`.
 *
 * # Safety
 * `beta_num`, `beta_den` must each point to `l` values; `out` must be
 * writable.
 */
enum AnomintStatus anomint_spectrum_new(size_t l,
                                        const int64_t *beta_num,
                                        const int64_t *beta_den,
                                        enum AnomintNormalization norm,
                                        int64_t emax_num,
                                        int64_t emax_den,
                                        struct AnomintSpectrum **out);

/**
 * # Safety
 * `spectrum` must be null or a handle from this library not yet freed.
 */
void anomint_spectrum_free(struct AnomintSpectrum *spectrum);

/**
 * Number of distinct levels, or 0 for a null handle.
 *
 * # Safety
 * `spectrum` must be null or a live handle.
 */
size_t anomint_spectrum_len(const struct AnomintSpectrum *spectrum);

/**
 * Level `index` in increasing energy order.
 *
 * # Safety
 * `spectrum` must be a live handle; `out` must be writable.
 */
enum AnomintStatus anomint_spectrum_level(const struct AnomintSpectrum *spectrum,
                                          size_t index,
                                          struct AnomintLevel *out);

/**
 * Number of occupation tuples at exactly `E = e_num / e_den`.
 *
 * # Safety
 * `beta_num`, `beta_den` must each point to `l` values; `out` must be
 * writable.
 */
enum AnomintStatus anomint_degeneracy(size_t l,
                                      const int64_t *beta_num,
                                      const int64_t *beta_den,
                                      enum AnomintNormalization norm,
                                      int64_t e_num,
                                      int64_t e_den,
                                      uint64_t *out);

/**
 * Order of the group on `l` letters, or 0 for `l = 0`.
 */
uint64_t anomint_weyl_order(size_t l, enum AnomintGroup group);

/**
 * Checks that every group element leaves the `(E, degeneracy)` multiset up
 * to `E_max` invariant.
 *
 * # Safety
 * `beta_num`, `beta_den` must each point to `l` values; `invariant` must be
 * writable.
 */
enum AnomintStatus anomint_weyl_check(size_t l,
                                      const int64_t *beta_num,
                                      const int64_t *beta_den,
                                      enum AnomintNormalization norm,
                                      int64_t emax_num,
                                      int64_t emax_den,
                                      enum AnomintGroup group,
                                      bool *invariant);

/**
 * Closed-form Heisenberg flow at time `t`: `fprime` receives the `n × n`
 * coefficients of `F'_α(t)` in `F'_α(0)`, `q_offsets` those of
 * `Q(t) − Q(0)`. Either buffer may be null to skip it.
 *
 * # Safety
 * `charges` must be a live handle; non-null buffers must hold `cap` doubles.
 */
enum AnomintStatus anomint_exact_flow(const struct AnomintCharges *charges,
                                      double t,
                                      double *fprime,
                                      double *q_offsets,
                                      size_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANOMINT_H */
