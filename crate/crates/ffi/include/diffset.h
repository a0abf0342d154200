#ifndef DIFFSET_H
#define DIFFSET_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DsCoverKind {
  DS_COVER_KIND_ADDITIVE = 0,
  DS_COVER_KIND_MULTIPLICATIVE = 1,
} DsCoverKind;

// Call outcome.
typedef enum DsStatus {
  DS_STATUS_OK = 0,
  DS_STATUS_NULL_POINTER = 1,
  DS_STATUS_INVALID_ARGUMENT = 2,
  DS_STATUS_NOT_A_UNIT = 3,
  DS_STATUS_PARSE = 4,
  DS_STATUS_MODULUS_MISMATCH = 5,
  DS_STATUS_INFEASIBLE = 6,
  DS_STATUS_EMPTY_SET = 7,
  DS_STATUS_BUFFER_TOO_SMALL = 8,
  DS_STATUS_PANIC = 9,
} DsStatus;

// `Z_q` with its cached factorization.
typedef struct DsRing DsRing;

// A subset of `Z_q`.
typedef struct DsSubset DsSubset;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next failing call on the same thread.
const char *ds_last_error_message(void);

enum DsStatus ds_ring_new(uint64_t q, struct DsRing **out);

void ds_ring_free(struct DsRing *ring);

// `q`, or `0` for a null handle.
uint64_t ds_ring_modulus(const struct DsRing *ring);

// `φ(q)`, or `0` for a null handle.
uint64_t ds_ring_phi(const struct DsRing *ring);

// `τ(q)`, or `0` for a null handle.
uint64_t ds_ring_tau(const struct DsRing *ring);

enum DsStatus ds_ring_mod_inverse(const struct DsRing *ring, uint64_t x, uint64_t *out);

// `K_q(λ, r)` as real and imaginary parts.
enum DsStatus ds_kloosterman(const struct DsRing *ring,
                             uint64_t lambda,
                             uint64_t r,
                             double *out_re,
                             double *out_im);

// Elements are reduced modulo `q`; `elems` may be null when `len` is 0.
enum DsStatus ds_subset_from_elements(const struct DsRing *ring,
                                      const uint64_t *elems,
                                      size_t len,
                                      struct DsSubset **out);

// Parses `q=<int>; {e1,e2,...}`.
enum DsStatus ds_subset_parse(const char *literal, struct DsSubset **out);

void ds_subset_free(struct DsSubset *set);

// `|S|`, or `0` for a null handle.
size_t ds_subset_len(const struct DsSubset *set);

// Modulus of the set, or `0` for a null handle.
uint64_t ds_subset_modulus(const struct DsSubset *set);

bool ds_subset_contains(const struct DsSubset *set, uint64_t x);

// Copies the elements in ascending order into `buf`. `out_len` always
// receives `|S|`; `BufferTooSmall` is returned if `cap < |S|`.
enum DsStatus ds_subset_to_elements(const struct DsSubset *set,
                                    uint64_t *buf,
                                    size_t cap,
                                    size_t *out_len);

// `q=<int>; {..}` as a new C string, released with [`ds_string_free`];
// null for a null handle.
char *ds_subset_to_string(const struct DsSubset *set);

void ds_string_free(char *s);

// `S - S`.
enum DsStatus ds_subset_difference(const struct DsSubset *set, struct DsSubset **out);

// `A + B`.
enum DsStatus ds_subset_sumset(const struct DsSubset *a,
                               const struct DsSubset *b,
                               struct DsSubset **out);

// `A · B`.
enum DsStatus ds_subset_product(const struct DsSubset *a,
                                const struct DsSubset *b,
                                struct DsSubset **out);

// `λ · S`.
enum DsStatus ds_subset_dilate(const struct DsSubset *set, uint64_t lambda, struct DsSubset **out);

// `(A - A)(B - B)`.
enum DsStatus ds_product_of_differences(const struct DsSubset *a,
                                        const struct DsSubset *b,
                                        struct DsSubset **out);

// Smallest `d | q` with `d·Z_q ⊆ (A - A)(B - B)`.
enum DsStatus ds_minimal_divisor_d(const struct DsSubset *a,
                                   const struct DsSubset *b,
                                   uint64_t *out_d);

// Exact covering number and a minimum cover `X`; `out_x` may be null.
enum DsStatus ds_cov_exact(const struct DsSubset *set,
                           enum DsCoverKind kind,
                           size_t *out_k,
                           struct DsSubset **out_x);

// `k*`, `X = [k*]^{-1}`, whether `X·(A - A) = Z_q`, and whether the least
// prime factor of `q` exceeds `2α^{-1} + 3`. `out_x` may be null.
enum DsStatus ds_theorem_cover(const struct DsSubset *set,
                               uint64_t *out_k_star,
                               struct DsSubset **out_x,
                               bool *out_verified,
                               bool *out_precondition);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIFFSET_H */
