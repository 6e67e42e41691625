/*
 * C interface to the bihari bound library.
 *
 * Every function that can fail returns a BihariStatus; on failure a
 * description is available from bihari_last_error_message() on the same
 * thread. Handles are opaque and must be released with the matching
 * *_free function. All array output is copied into caller-owned buffers.
 */

#ifndef BIHARI_H
#define BIHARI_H

/* Generated by cbindgen from bihari-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Column selector for `bihari_bound_column`. Columns a bound kind does not
 * produce (for example `FACTOR` outside the class-H kinds) read as zeros.
 */
typedef enum BihariColumn {
  BIHARI_COLUMN_T = 0,
  BIHARI_COLUMN_A = 1,
  BIHARI_COLUMN_ETA = 2,
  BIHARI_COLUMN_INNER = 3,
  BIHARI_COLUMN_P = 4,
  BIHARI_COLUMN_Q = 5,
  BIHARI_COLUMN_FACTOR = 6,
  BIHARI_COLUMN_BOUND = 7,
} BihariColumn;

/**
 * Result of any fallible call. `SOLVER` covers non-convergence and
 * divergence of the equality-case iteration; `SCENARIO` covers every other
 * library error (parse, schema, hypothesis, numeric domain). `INTERNAL`
 * reports a caught panic and indicates a bug in the library itself.
 */
typedef enum BihariStatus {
  BIHARI_STATUS_OK = 0,
  BIHARI_STATUS_NULL_ARGUMENT = 1,
  BIHARI_STATUS_SCENARIO = 2,
  BIHARI_STATUS_SOLVER = 3,
  BIHARI_STATUS_INTERNAL = 4,
} BihariStatus;

/**
 * A computed bound, restricted to the certified prefix `[a, t_star]`.
 */
typedef struct BihariBound BihariBound;

/**
 * A parsed and validated scenario, ready to bound or solve.
 */
typedef struct BihariInstance BihariInstance;

/**
 * A fixed-point solution of the equality case, on the full grid.
 */
typedef struct BihariSolution BihariSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse a scenario from TOML text and build it into an instance handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer; on
 * `BIHARI_STATUS_OK` the caller owns the handle written to `*out` and must
 * release it with `bihari_instance_free`.
 */
enum BihariStatus bihari_instance_from_toml(const char *text, struct BihariInstance **out);

/**
 * Read a scenario file from disk and build it into an instance handle.
 *
 * # Safety
 * Same contract as [`bihari_instance_from_toml`]; `path` must be a
 * NUL-terminated file path.
 */
enum BihariStatus bihari_instance_from_file(const char *path, struct BihariInstance **out);

/**
 * Scenario kind token: "lemma1", "thm1", "lemma2", "thm2" or
 * "application". Returns a static string; NULL for a null handle.
 *
 * # Safety
 * `inst` must be a live handle from this library or NULL.
 */
const char *bihari_instance_kind(const struct BihariInstance *inst);

/**
 * Number of grid nodes the instance discretises onto (0 for NULL).
 *
 * # Safety
 * `inst` must be a live handle from this library or NULL.
 */
size_t bihari_instance_grid_points(const struct BihariInstance *inst);

/**
 * Release an instance handle. NULL is a no-op.
 *
 * # Safety
 * `inst` must be a handle from this library that has not been freed yet.
 */
void bihari_instance_free(struct BihariInstance *inst);

/**
 * Compute the certified bound for the instance, using the psi argument
 * mode declared in the scenario.
 *
 * # Safety
 * `inst` must be a live handle and `out` a valid pointer; on
 * `BIHARI_STATUS_OK` the caller owns the bound handle written to `*out`
 * and must release it with `bihari_bound_free`.
 */
enum BihariStatus bihari_bound_compute(const struct BihariInstance *inst, struct BihariBound **out);

/**
 * Number of certified nodes in the bound (0 for NULL). Every column has
 * exactly this many entries.
 *
 * # Safety
 * `bound` must be a live handle from this library or NULL.
 */
size_t bihari_bound_len(const struct BihariBound *bound);

/**
 * The certified horizon `t_star` (NaN for NULL).
 *
 * # Safety
 * `bound` must be a live handle from this library or NULL.
 */
double bihari_bound_t_star(const struct BihariBound *bound);

/**
 * Grid node index of `t_star` (0 for NULL).
 *
 * # Safety
 * `bound` must be a live handle from this library or NULL.
 */
size_t bihari_bound_t_star_node(const struct BihariBound *bound);

/**
 * True when the domain condition already fails at the first grid step and
 * only the initial node is certified.
 *
 * # Safety
 * `bound` must be a live handle from this library or NULL.
 */
bool bihari_bound_degenerate(const struct BihariBound *bound);

/**
 * Copy one column of the bound table into `dst`, writing
 * `min(cap, bihari_bound_len(bound))` values.
 *
 * # Safety
 * `bound` must be a live handle and `dst` must point to at least `cap`
 * writable doubles.
 */
enum BihariStatus bihari_bound_column(const struct BihariBound *bound,
                                      enum BihariColumn column,
                                      double *dst,
                                      size_t cap);

/**
 * Release a bound handle. NULL is a no-op.
 *
 * # Safety
 * `bound` must be a handle from this library that has not been freed yet.
 */
void bihari_bound_free(struct BihariBound *bound);

/**
 * Solve the equality case of the instance by Picard iteration, using the
 * solver settings declared in the scenario.
 *
 * # Safety
 * `inst` must be a live handle and `out` a valid pointer; on
 * `BIHARI_STATUS_OK` the caller owns the solution handle written to
 * `*out` and must release it with `bihari_solution_free`.
 */
enum BihariStatus bihari_solve(const struct BihariInstance *inst, struct BihariSolution **out);

/**
 * Number of grid nodes in the solution (0 for NULL); the solution always
 * covers the full grid, certified or not.
 *
 * # Safety
 * `sol` must be a live handle from this library or NULL.
 */
size_t bihari_solution_len(const struct BihariSolution *sol);

/**
 * Copy the solution values into `dst`, writing
 * `min(cap, bihari_solution_len(sol))` values.
 *
 * # Safety
 * `sol` must be a live handle and `dst` must point to at least `cap`
 * writable doubles.
 */
enum BihariStatus bihari_solution_values(const struct BihariSolution *sol, double *dst, size_t cap);

/**
 * Copy the pointwise fixed-point residual into `dst`, writing
 * `min(cap, bihari_solution_len(sol))` values.
 *
 * # Safety
 * `sol` must be a live handle and `dst` must point to at least `cap`
 * writable doubles.
 */
enum BihariStatus bihari_solution_residual(const struct BihariSolution *sol,
                                           double *dst,
                                           size_t cap);

/**
 * Supremum of the fixed-point residual (NaN for NULL).
 *
 * # Safety
 * `sol` must be a live handle from this library or NULL.
 */
double bihari_solution_residual_sup(const struct BihariSolution *sol);

/**
 * Picard sweeps performed before convergence (0 for NULL).
 *
 * # Safety
 * `sol` must be a live handle from this library or NULL.
 */
size_t bihari_solution_iterations(const struct BihariSolution *sol);

/**
 * Release a solution handle. NULL is a no-op.
 *
 * # Safety
 * `sol` must be a handle from this library that has not been freed yet.
 */
void bihari_solution_free(struct BihariSolution *sol);

/**
 * Check that the bound dominates the solution over the certified prefix:
 * pass means `u - bound <= abs_tol + rel_tol * |bound|` at every certified
 * node. Writes the verdict to `*pass` and the largest `u - bound` seen to
 * `*max_violation` (either may be NULL to skip it).
 *
 * # Safety
 * `sol` and `bound` must be live handles; `pass` and `max_violation` must
 * each be NULL or valid for writing.
 */
enum BihariStatus bihari_check_dominance(const struct BihariSolution *sol,
                                         const struct BihariBound *bound,
                                         double abs_tol,
                                         double rel_tol,
                                         bool *pass,
                                         double *max_violation);

/**
 * Description of the most recent failure on this thread, or an empty
 * string. The pointer stays valid until the next failing call on the same
 * thread.
 */
const char *bihari_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *bihari_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BIHARI_H */
