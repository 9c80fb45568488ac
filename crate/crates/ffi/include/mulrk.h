#ifndef MULRK_H
#define MULRK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define MULRK_METHOD_MRK2 0

#define MULRK_METHOD_MRK4 1

#define MULRK_METHOD_RK4 2

// `rhs_kind` of `mulrk_problem_from_expr`: multiplicative f(x, y).
#define MULRK_RHS_MULT 0

// `rhs_kind` of `mulrk_problem_from_expr`: ordinary g(x, y).
#define MULRK_RHS_ORDINARY 1

// Result codes.
typedef enum MulrkStatus {
  MULRK_STATUS_OK = 0,
  // A required pointer argument was null.
  MULRK_STATUS_NULL_POINTER = 1,
  // Bad argument, unknown name, or a step grid that does not divide the interval.
  MULRK_STATUS_INVALID_ARGUMENT = 2,
  // The multiplicative representation broke down (typically at a root).
  MULRK_STATUS_DOMAIN = 3,
  // Expression could not be parsed.
  MULRK_STATUS_SYNTAX = 4,
  // Index outside the trajectory.
  MULRK_STATUS_OUT_OF_RANGE = 5,
  // Internal error; the library caught a panic.
  MULRK_STATUS_INTERNAL = 6,
} MulrkStatus;

// Opaque problem handle.
typedef struct MulrkProblem MulrkProblem;

// Opaque trajectory handle.
typedef struct MulrkTrajectory MulrkTrajectory;

// Root-bypass settings.
typedef struct MulrkHybridConfig {
  // Hand over to RK4 when any |y| falls below this.
  double zero_threshold;
  // Minimum RK4 steps before handing back.
  size_t min_ordinary_steps;
  // Hand back once every |y| exceeds rearm_factor * zero_threshold.
  double rearm_factor;
} MulrkHybridConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Looks up a registered problem, optionally overriding `n_params` named
// parameters (`keys[i] = values[i]`). `keys`/`values` may be null when
// `n_params` is 0.
//
// # Safety
// `name` and every `keys[i]` must be NUL-terminated strings; `keys` and
// `values` must hold `n_params` elements; `out` must be writable.
enum MulrkStatus mulrk_problem_from_registry(const char *name,
                                             const char *const *keys,
                                             const double *values,
                                             size_t n_params,
                                             struct MulrkProblem **out);

// Scalar problem from an expression in `x` and `y`.
//
// # Safety
// `expr` must be a NUL-terminated string and `out` writable.
enum MulrkStatus mulrk_problem_from_expr(int rhs_kind,
                                         const char *expr,
                                         double x0,
                                         double y0_re,
                                         double y0_im,
                                         struct MulrkProblem **out);

// Default step and end point of a registered problem.
//
// # Safety
// `problem` must come from this library; `h` and `x_end` must be writable.
enum MulrkStatus mulrk_problem_defaults(const struct MulrkProblem *problem,
                                        double *h,
                                        double *x_end);

// State dimension, or 0 for a null handle.
//
// # Safety
// `problem` must be null or come from this library.
size_t mulrk_problem_dim(const struct MulrkProblem *problem);

// # Safety
// `problem` must be null or come from this library and not be used afterwards.
void mulrk_problem_free(struct MulrkProblem *problem);

// Integrates on the grid `x0, x0 + h, ..., x_end`. For registered
// second-order problems `MULRK_METHOD_RK4` integrates the ordinary system.
//
// # Safety
// `problem` must come from this library and `out` be writable.
enum MulrkStatus mulrk_solve(const struct MulrkProblem *problem,
                             int method,
                             double h,
                             double x_end,
                             struct MulrkTrajectory **out);

// Default root-bypass settings for `problem`.
//
// # Safety
// `problem` must come from this library and `cfg` be writable.
enum MulrkStatus mulrk_hybrid_default(const struct MulrkProblem *problem,
                                      struct MulrkHybridConfig *cfg);

// MRK4 with an ordinary RK4 bypass around roots. `cfg` may be null for defaults.
//
// # Safety
// `problem` must come from this library, `cfg` be null or readable, and
// `out` writable.
enum MulrkStatus mulrk_solve_hybrid(const struct MulrkProblem *problem,
                                    double h,
                                    double x_end,
                                    const struct MulrkHybridConfig *cfg,
                                    struct MulrkTrajectory **out);

// Number of samples (steps + 1), or 0 for a null handle.
//
// # Safety
// `traj` must be null or come from this library.
size_t mulrk_trajectory_len(const struct MulrkTrajectory *traj);

// State dimension, or 0 for a null handle.
//
// # Safety
// `traj` must be null or come from this library.
size_t mulrk_trajectory_dim(const struct MulrkTrajectory *traj);

// Sample `index`, component `component`. Any of the output pointers may be
// null. `method` receives the `MULRK_METHOD_*` code of the producing scheme.
//
// # Safety
// `traj` must come from this library; non-null outputs must be writable.
enum MulrkStatus mulrk_trajectory_sample(const struct MulrkTrajectory *traj,
                                         size_t index,
                                         size_t component,
                                         double *x,
                                         double *re,
                                         double *im,
                                         int *method);

// # Safety
// `traj` must be null or come from this library and not be used afterwards.
void mulrk_trajectory_free(struct MulrkTrajectory *traj);

// Message for the last failed call on this thread; empty after a success.
// Valid until the next call into the library on the same thread.
const char *mulrk_last_error(void);

// Library version, a static NUL-terminated string.
const char *mulrk_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MULRK_H */
