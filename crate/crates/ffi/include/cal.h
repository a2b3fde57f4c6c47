#ifndef CAL_H
#define CAL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CalRegretMode {
  CAL_REGRET_MODE_OBLIVIOUS = 0,
  CAL_REGRET_MODE_ADAPTIVE = 1,
} CalRegretMode;

typedef enum CalStatus {
  CAL_STATUS_OK = 0,
  /**
   * A required pointer was null.
   */
  CAL_STATUS_ERR_NULL = 1,
  /**
   * Malformed input or a failed precondition.
   */
  CAL_STATUS_ERR_INPUT = 2,
  /**
   * A search budget or expert cap was reached.
   */
  CAL_STATUS_ERR_BUDGET = 3,
  /**
   * A bug or panic inside the library.
   */
  CAL_STATUS_ERR_INTERNAL = 4,
} CalStatus;

typedef enum CalTreeKind {
  CAL_TREE_KIND_PLAIN = 0,
  CAL_TREE_KIND_RELAXED = 1,
} CalTreeKind;

/**
 * Opaque problem handle.
 */
typedef struct CalProblem CalProblem;

/**
 * An ε-dimension search result. `value` is a lower bound unless `exact` is set.
 */
typedef struct CalDimension {
  uint64_t value;
  bool exact;
  bool budget_exhausted;
} CalDimension;

typedef struct CalRegret {
  double mean;
  double std_error;
  double mean_loss;
  double comparator_loss;
  uint64_t reps;
  bool approximate;
} CalRegret;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static nul-terminated string.
 */
const char *cal_version(void);

/**
 * Message of the last failed call on this thread, or null. Valid until the next call.
 */
const char *cal_last_error(void);

/**
 * Parses a problem document and stores a new handle in `*out`.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a writable pointer.
 */
enum CalStatus cal_problem_from_json(const char *json, struct CalProblem **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `p` must be null or a handle from [`cal_problem_from_json`] not yet freed.
 */
void cal_problem_free(struct CalProblem *p);

/**
 * Number of points and of functions of a finite problem.
 *
 * # Safety
 * `p` must be a live handle; `points` and `functions` writable pointers.
 */
enum CalStatus cal_problem_size(const struct CalProblem *p, uint64_t *points, uint64_t *functions);

/**
 * VC and Littlestone dimensions of the problem's class.
 *
 * # Safety
 * `p` must be a live handle; `vc` and `littlestone` writable pointers.
 */
enum CalStatus cal_class_dimensions(const struct CalProblem *p,
                                    uint64_t *vc,
                                    uint64_t *littlestone);

/**
 * `k(ε)` at `ε = eps_num / eps_den`.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum CalStatus cal_k_of_eps(const struct CalProblem *p,
                            int64_t eps_num,
                            int64_t eps_den,
                            int64_t *out);

/**
 * Depth of the deepest shattered tree found within `budget` node expansions.
 * A binding budget still fills `out` and returns `ErrBudget`.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum CalStatus cal_eps_dimension(const struct CalProblem *p,
                                 enum CalTreeKind kind,
                                 int64_t eps_num,
                                 int64_t eps_den,
                                 uint64_t budget,
                                 struct CalDimension *out);

/**
 * Monte-Carlo regret estimate of `learner` against `adversary`, both given as spec
 * strings such as `level:eps=1/8` and `critical:realizable,eps=1/8`.
 *
 * # Safety
 * `p` must be a live handle, the specs nul-terminated strings and `out` writable.
 */
enum CalStatus cal_estimate_regret(const struct CalProblem *p,
                                   const char *learner,
                                   const char *adversary,
                                   uint64_t horizon,
                                   uint64_t reps,
                                   uint64_t seed,
                                   enum CalRegretMode mode,
                                   struct CalRegret *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAL_H */
