#ifndef PROPSCORE_H
#define PROPSCORE_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PsStatus {
  PS_STATUS_OK = 0,
  PS_STATUS_NULL_POINTER = 1,
  PS_STATUS_DIMENSION = 2,
  PS_STATUS_DOMAIN = 3,
  PS_STATUS_INVALID_ARGUMENT = 4,
  PS_STATUS_PANIC = 5,
} PsStatus;

/**
 * Convex entropy with value and subgradient oracles.
 */
typedef struct PsEntropy PsEntropy;

/**
 * Finite measure space.
 */
typedef struct PsMeasureSpace PsMeasureSpace;

/**
 * Scoring rule.
 */
typedef struct PsRule PsRule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. Owned by the library.
 */
const char *ps_last_error_message(void);

/**
 * Create a measure space with the given positive weights.
 */
enum PsStatus ps_measure_space_new(const double *weights, size_t n, struct PsMeasureSpace **out);

size_t ps_measure_space_size(const struct PsMeasureSpace *space);

void ps_measure_space_free(struct PsMeasureSpace *space);

/**
 * Catalog entropy by name (`quadratic`, `spherical`, `shannon`, `power`,
 * `pseudospherical`, `weighted_quadratic`) with its parameters.
 */
enum PsStatus ps_entropy_new(const char *name,
                             const double *params,
                             size_t nparams,
                             struct PsEntropy **out);

void ps_entropy_free(struct PsEntropy *entropy);

/**
 * `Φ(q)`.
 */
enum PsStatus ps_entropy_value(const struct PsEntropy *entropy,
                               const struct PsMeasureSpace *space,
                               const double *q,
                               size_t n,
                               double *out);

/**
 * A subgradient `Φ*(q)`, written to `out[0..n]`.
 */
enum PsStatus ps_entropy_subgradient(const struct PsEntropy *entropy,
                                     const struct PsMeasureSpace *space,
                                     const double *q,
                                     size_t n,
                                     double *out);

/**
 * `D(p, q) = Φ(p) − (p−q)·Φ*(q) − Φ(q)`.
 */
enum PsStatus ps_bregman_divergence(const struct PsEntropy *entropy,
                                    const struct PsMeasureSpace *space,
                                    const double *p,
                                    const double *q,
                                    size_t n,
                                    double *out);

/**
 * Scoring rule generated by an entropy. The entropy handle may be freed afterwards.
 */
enum PsStatus ps_rule_new(const struct PsEntropy *entropy, struct PsRule **out);

/**
 * The improper rule `S(q) = q`, useful as a negative control.
 */
enum PsStatus ps_rule_linear(struct PsRule **out);

void ps_rule_free(struct PsRule *rule);

/**
 * `S(q)` for a density `q`, written to `out[0..n]`; may contain `-inf`.
 */
enum PsStatus ps_rule_score(const struct PsRule *rule,
                            const struct PsMeasureSpace *space,
                            const double *q,
                            size_t n,
                            double *out);

/**
 * `p·S(p) − p·S(q)` for densities; `+inf` when `q` scores `-inf` where `p` has mass.
 */
enum PsStatus ps_score_divergence(const struct PsRule *rule,
                                  const struct PsMeasureSpace *space,
                                  const double *p,
                                  const double *q,
                                  size_t n,
                                  double *out);

/**
 * Hyvärinen score of positive grid values on the unit periodic grid with `n` points.
 */
enum PsStatus ps_hyvarinen_score(const double *values, size_t n, double *out);

/**
 * Fisher entropy `Σ q g² h` of positive grid values.
 */
enum PsStatus ps_fisher_entropy(const double *values, size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PROPSCORE_H */
