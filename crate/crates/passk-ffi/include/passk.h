/* C interface to the passk simulation library. */

#ifndef PASSK_H
#define PASSK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of a C API call.
 */
typedef enum PasskStatus {
  PASSK_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  PASSK_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  PASSK_STATUS_INVALID_UTF8 = 2,
  /**
   * A strategy or generator spec string did not parse.
   */
  PASSK_STATUS_PARSE_ERROR = 3,
  /**
   * An instance failed validation; see `passk_last_error`.
   */
  PASSK_STATUS_INVALID_INSTANCE = 4,
  /**
   * A parameter violated a documented precondition.
   */
  PASSK_STATUS_PRECONDITION = 5,
  /**
   * Exhaustive enumeration would exceed its state-count guard.
   */
  PASSK_STATUS_INFEASIBLE = 6,
  /**
   * File I/O failed.
   */
  PASSK_STATUS_IO_ERROR = 7,
  /**
   * Internal failure (a panic was caught at the boundary).
   */
  PASSK_STATUS_INTERNAL = 8,
} PasskStatus;

/**
 * Opaque handle to a validated instance.
 */
typedef struct PasskInstance {
  uint8_t _private[0];
} PasskInstance;

/**
 * Derived instance statistics.
 */
typedef struct PasskDerivedStats {
  /**
   * Coverage coefficient C*.
   */
  double coverage;
  double eps_rm;
  double eps_opt;
} PasskDerivedStats;

/**
 * Monte Carlo regret estimate.
 */
typedef struct PasskRegretEstimate {
  double mean;
  /**
   * Standard error of the mean (named to avoid C's `stderr` macro).
   */
  double std_error;
  uint64_t trials;
  double ci95_low;
  double ci95_high;
} PasskRegretEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *passk_last_error(void);

/**
 * Parses and validates an instance from its JSON document.
 *
 * # Safety
 *
 * Pointer arguments must be valid (or NULL where documented); handles must
 * come from this library and still be live.
 */
enum PasskStatus passk_instance_from_json(const char *json, struct PasskInstance **out);

/**
 * Loads and validates an instance from a JSON file.
 *
 * # Safety
 *
 * Pointer arguments must be valid (or NULL where documented); handles must
 * come from this library and still be live.
 */
enum PasskStatus passk_instance_from_file(const char *path, struct PasskInstance **out);

/**
 * Builds one member of a generator-spec family, e.g.
 * `"hammer:cstar=16,k=4,m=8,eps_rm=0.1"` (see the README for the grammar).
 *
 * # Safety
 *
 * Pointer arguments must be valid (or NULL where documented); handles must
 * come from this library and still be live.
 */
enum PasskStatus passk_instance_from_spec(const char *spec,
                                          size_t member,
                                          struct PasskInstance **out);

/**
 * Number of members the generator spec would produce.
 *
 * # Safety
 *
 * Pointer arguments must be valid (or NULL where documented); handles must
 * come from this library and still be live.
 */
enum PasskStatus passk_spec_family_size(const char *spec, size_t *out);

/**
 * Serializes the instance back to its JSON document. Free the string with
 * `passk_string_free`.
 *
 * # Safety
 *
 * Pointer arguments must be valid (or NULL where documented); handles must
 * come from this library and still be live.
 */
enum PasskStatus passk_instance_to_json(const struct PasskInstance *instance, char **out);

/**
 * Releases an instance handle. NULL is a no-op.
 *
 * # Safety
 *
 * Pointer arguments must be valid (or NULL where documented); handles must
 * come from this library and still be live.
 */
void passk_instance_free(struct PasskInstance *instance);

/**
 * Releases a string returned by this library. NULL is a no-op.
 *
 * # Safety
 *
 * `text` must have been returned by this library and not freed before.
 */
void passk_string_free(char *text);

/**
 * Number of responses in the instance's universe.
 *
 * # Safety
 *
 * Pointer arguments must be valid (or NULL where documented); handles must
 * come from this library and still be live.
 */
enum PasskStatus passk_instance_len(const struct PasskInstance *instance, size_t *out);

/**
 * Coverage coefficient and reward-model errors of the instance.
 *
 * # Safety
 *
 * Pointer arguments must be valid (or NULL where documented); handles must
 * come from this library and still be live.
 */
enum PasskStatus passk_instance_stats(const struct PasskInstance *instance,
                                      struct PasskDerivedStats *out);

/**
 * Monte Carlo regret of `strategy` (a config string such as `"bon"` or
 * `"bom:alpha=auto"`) over `trials` independent batches of `n` draws.
 *
 * # Safety
 *
 * Pointer arguments must be valid (or NULL where documented); handles must
 * come from this library and still be live.
 */
enum PasskStatus passk_estimate_regret(const struct PasskInstance *instance,
                                       const char *strategy,
                                       uint64_t n,
                                       uint64_t k,
                                       uint64_t trials,
                                       uint64_t seed,
                                       struct PasskRegretEstimate *out);

/**
 * Exact regret by exhaustive enumeration (guarded by the state-count limit).
 *
 * # Safety
 *
 * Pointer arguments must be valid (or NULL where documented); handles must
 * come from this library and still be live.
 */
enum PasskStatus passk_exact_regret(const struct PasskInstance *instance,
                                    const char *strategy,
                                    uint64_t n,
                                    uint64_t k,
                                    double *out);

/**
 * Empirical probability of the frequency-sandwich event at threshold
 * `3/(4 C*)`.
 *
 * # Safety
 *
 * Pointer arguments must be valid (or NULL where documented); handles must
 * come from this library and still be live.
 */
enum PasskStatus passk_event_e_monte_carlo(const struct PasskInstance *instance,
                                           uint64_t n,
                                           uint64_t trials,
                                           uint64_t seed,
                                           double *out);

/**
 * Best-of-Majority regret upper bound, clamped to [0, 1].
 */
double passk_bom_upper_bound(double c_star, uint64_t k, double eps_rm, double eps_opt, uint64_t n);

/**
 * Minimal sampling budget for the Best-of-Majority guarantee.
 *
 * # Safety
 *
 * Pointer arguments must be valid (or NULL where documented); handles must
 * come from this library and still be live.
 */
enum PasskStatus passk_bom_min_budget(double c_star, uint64_t k, double eps_rm, uint64_t *out);

/**
 * Majority-voting constant-regret budget threshold `ceil(9 C* ln(2k + 2))`.
 */
uint64_t passk_mv_budget(double c_star, uint64_t k);

/**
 * Minimax lower bound from an m-member symmetric family.
 *
 * # Safety
 *
 * Pointer arguments must be valid (or NULL where documented); handles must
 * come from this library and still be live.
 */
enum PasskStatus passk_general_lower_bound(double c_star,
                                           uint64_t k,
                                           uint64_t m,
                                           double eps_rm,
                                           double *out);

/**
 * Best-of-N regret lower bound `min(1, 0.004 sqrt(N eps_rm^2 / k))`.
 */
double passk_bon_lower_bound(uint64_t n, uint64_t k, double eps_rm);

/**
 * Analytic lower bound on the frequency-sandwich probability.
 */
double passk_event_e_prob_bound(double c_star, uint64_t n);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PASSK_H */
