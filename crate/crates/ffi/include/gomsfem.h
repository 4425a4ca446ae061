#ifndef GOMSFEM_H
#define GOMSFEM_H

/* Generated by cbindgen from crates/ffi/src; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum GomsfemStatus {
  GOMSFEM_STATUS_OK = 0,
  GOMSFEM_STATUS_NULL_POINTER = 1,
  /**
   * Bad grid sizes, strategy parameters, goal region or preset name.
   */
  GOMSFEM_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Non-positive or mis-sized permeability data.
   */
  GOMSFEM_STATUS_INVALID_FIELD = 3,
  /**
   * Factorization, eigensolver or basis admission failure.
   */
  GOMSFEM_STATUS_NUMERICAL = 4,
  /**
   * Output buffer too small; nothing was written.
   */
  GOMSFEM_STATUS_BUFFER_TOO_SMALL = 5,
  GOMSFEM_STATUS_IO = 6,
  /**
   * An internal panic was caught.
   */
  GOMSFEM_STATUS_INTERNAL = 7,
} GomsfemStatus;

typedef enum GomsfemTermination {
  GOMSFEM_TERMINATION_CONVERGED = 0,
  GOMSFEM_TERMINATION_ITERATION_CAP = 1,
  GOMSFEM_TERMINATION_DOF_CAP = 2,
  GOMSFEM_TERMINATION_NO_ADMISSIBLE_BASIS = 3,
} GomsfemTermination;

typedef enum GomsfemStrategy {
  /**
   * `param_a` = θ, `param_b` = γ.
   */
  GOMSFEM_STRATEGY_STANDARD = 0,
  /**
   * `param_a` = β.
   */
  GOMSFEM_STRATEGY_COMBINED = 1,
  /**
   * `param_a` = τ.
   */
  GOMSFEM_STRATEGY_PRODUCT = 2,
} GomsfemStrategy;

/**
 * A fine grid, permeability field, source and goal.
 */
typedef struct GomsfemProblem GomsfemProblem;

/**
 * The result of [`gomsfem_run`].
 */
typedef struct GomsfemRun GomsfemRun;

/**
 * Run settings; fill with [`gomsfem_config_default`] and override fields.
 */
typedef struct GomsfemConfig {
  /**
   * A [`GomsfemStrategy`] value.
   */
  int32_t strategy;
  double param_a;
  double param_b;
  double tol;
  /**
   * Offline basis functions per neighborhood.
   */
  size_t l_i;
  size_t max_iter;
  /**
   * 0 means the number of free fine DOFs.
   */
  size_t max_dof;
  /**
   * Nonzero skips the fine reference solves; error fields are then NaN.
   */
  int32_t no_reference;
  /**
   * Nonzero restricts the spectral weight to interior coarse nodes.
   */
  int32_t interior_kappa_tilde;
} GomsfemConfig;

/**
 * One history row; missing errors are NaN.
 */
typedef struct GomsfemHistoryRow {
  size_t m;
  size_t dof;
  double goal_error;
  double primal_energy_error;
  double dual_energy_error;
  size_t n_primal_added;
  size_t n_dual_added;
  double sum_r_sq;
  double sum_rstar_sq;
} GomsfemHistoryRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a problem on a `coarse × coarse` grid refined `refine` times per
 * axis, with `kappa` holding one value per fine cell, row-major from the
 * bottom-left. Source and goal start at the CLI defaults.
 *
 * # Safety
 * `kappa` must be valid for `len` reads and `out` for one write.
 */
enum GomsfemStatus gomsfem_problem_new(size_t coarse,
                                       size_t refine,
                                       const double *kappa,
                                       size_t len,
                                       struct GomsfemProblem **out);

/**
 * Creates a problem from a shipped field spec (`ex1`, `ex3-lo`, `ex3-hi`).
 * `seed` overrides the spec's seed when `has_seed` is nonzero.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` valid for one write.
 */
enum GomsfemStatus gomsfem_problem_new_preset(size_t coarse,
                                              size_t refine,
                                              const char *name,
                                              uint64_t seed,
                                              int32_t has_seed,
                                              struct GomsfemProblem **out);

/**
 * Number of fine cells, the length expected by [`gomsfem_problem_set_source`].
 *
 * # Safety
 * `problem` must be null or a live handle.
 */
size_t gomsfem_problem_num_cells(const struct GomsfemProblem *problem);

/**
 * Replaces the source with a cell-wise density (row-major, bottom-left first).
 *
 * # Safety
 * `problem` must be a live handle and `density` valid for `len` reads.
 */
enum GomsfemStatus gomsfem_problem_set_source(struct GomsfemProblem *problem,
                                              const double *density,
                                              size_t len);

/**
 * Replaces the source with `+a` on `[1/8, 3/8]²` and `−a` on `[5/8, 7/8]²`.
 *
 * # Safety
 * `problem` must be a live handle.
 */
enum GomsfemStatus gomsfem_problem_set_source_blocks(struct GomsfemProblem *problem,
                                                     double amplitude);

/**
 * Sets the goal `g(v) = scale·∫_K v` over `K = [x0, x1] × [y0, y1]`.
 *
 * # Safety
 * `problem` must be a live handle.
 */
enum GomsfemStatus gomsfem_problem_set_goal(struct GomsfemProblem *problem,
                                            double x0,
                                            double y0,
                                            double x1,
                                            double y1,
                                            double scale);

/**
 * # Safety
 * `problem` must be null or a handle not yet freed.
 */
void gomsfem_problem_free(struct GomsfemProblem *problem);

/**
 * Combined strategy, β = 0.6, l_i = 3 and the CLI's tolerance and caps.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum GomsfemStatus gomsfem_config_default(struct GomsfemConfig *out);

/**
 * Runs the offline stage and the adaptive loop.
 *
 * # Safety
 * `problem` and `config` must be live, `out` valid for one write.
 */
enum GomsfemStatus gomsfem_run(const struct GomsfemProblem *problem,
                               const struct GomsfemConfig *config,
                               struct GomsfemRun **out);

/**
 * # Safety
 * `run` must be live and `out` valid for one write.
 */
enum GomsfemStatus gomsfem_run_termination(const struct GomsfemRun *run,
                                           enum GomsfemTermination *out);

/**
 * Number of history rows (iterations + 1), or 0 for a null handle.
 *
 * # Safety
 * `run` must be null or live.
 */
size_t gomsfem_run_history_len(const struct GomsfemRun *run);

/**
 * # Safety
 * `run` must be live and `out` valid for one write.
 */
enum GomsfemStatus gomsfem_run_history_row(const struct GomsfemRun *run,
                                           size_t index,
                                           struct GomsfemHistoryRow *out);

/**
 * Copies the final multiscale solution (`dual == 0`: primal `u_ms`,
 * otherwise `z_ms`) over the free fine nodes, row-major from the first
 * interior node. Returns [`GomsfemStatus::BufferTooSmall`] when `len` is
 * below the number of free nodes, which is written to `needed` if non-null.
 *
 * # Safety
 * `run` must be live, `buf` valid for `len` writes, `needed` null or valid.
 */
enum GomsfemStatus gomsfem_run_solution(const struct GomsfemRun *run,
                                        int32_t dual,
                                        double *buf,
                                        size_t len,
                                        size_t *needed);

/**
 * # Safety
 * `run` must be null or a handle not yet freed.
 */
void gomsfem_run_free(struct GomsfemRun *run);

/**
 * Message of the last failed call on this thread, or an empty string. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *gomsfem_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gomsfem_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GOMSFEM_H */
