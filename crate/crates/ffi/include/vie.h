#ifndef VIE_FFI_H
#define VIE_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Number of `B(j)` values reported in [`VieDiagnostics`].
#define VIE_B_LEN 6

// Result codes. The first four match the `vie` CLI exit codes.
typedef enum VieStatus {
  VIE_STATUS_OK = 0,
  VIE_STATUS_CONFIG_ERROR = 1,
  VIE_STATUS_NUMERICAL_ERROR = 2,
  VIE_STATUS_PARSE_ERROR = 3,
  VIE_STATUS_NULL_POINTER = 4,
  VIE_STATUS_INVALID_ARGUMENT = 5,
  VIE_STATUS_PANIC = 6,
} VieStatus;

// Opaque problem handle.
typedef struct VieProblem VieProblem;

// Opaque solution handle.
typedef struct VieSolution VieSolution;

// Scalar diagnostics of a problem. Quantities that could not be computed
// have their `*_defined` flag cleared.
typedef struct VieDiagnostics {
  double d0;
  bool d0_defined;
  double x0_denominator;
  bool x0_denominator_defined;
  // `B(0) … B(VIE_B_LEN - 1)`, valid when `b_defined`.
  double b[VIE_B_LEN];
  bool b_defined;
  // Bit `j` set when `|B(j)|` is approximately zero.
  uint32_t b_flagged_mask;
  bool ordering_ok;
  uintptr_t warning_count;
} VieDiagnostics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or an empty string.
// The pointer stays valid until the next call into this library from the
// same thread.
const char *vie_last_error(void);

// Parses and validates a problem from a JSON document.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a writable pointer.
enum VieStatus vie_problem_from_json(const char *json, struct VieProblem **out);

// One of the built-in examples, `id` in 1..=3.
//
// # Safety
// `out` must be a writable pointer.
enum VieStatus vie_problem_from_example(uint32_t id, struct VieProblem **out);

// Releases a problem. Null is ignored.
//
// # Safety
// `problem` must come from this library and not have been freed.
void vie_problem_free(struct VieProblem *problem);

// Number of kernel pieces, or 0 for a null handle.
//
// # Safety
// `problem` must be null or a live handle.
uintptr_t vie_problem_pieces(const struct VieProblem *problem);

// Right end of the time interval, or NaN for a null handle.
//
// # Safety
// `problem` must be null or a live handle.
double vie_problem_horizon(const struct VieProblem *problem);

// Fills `out` with the problem's diagnostics.
//
// # Safety
// `problem` must be a live handle and `out` writable.
enum VieStatus vie_problem_diagnostics(const struct VieProblem *problem,
                                       struct VieDiagnostics *out);

// Solves on a uniform mesh with `n` segments.
//
// # Safety
// `problem` must be a live handle and `out` writable.
enum VieStatus vie_solve(const struct VieProblem *problem, uintptr_t n, struct VieSolution **out);

// Releases a solution. Null is ignored.
//
// # Safety
// `solution` must come from this library and not have been freed.
void vie_solution_free(struct VieSolution *solution);

// Number of mesh segments `N`, or 0 for a null handle. Node arrays have `N + 1` entries.
//
// # Safety
// `solution` must be null or a live handle.
uintptr_t vie_solution_segments(const struct VieSolution *solution);

// Copies node times and values into `t_out` and `x_out`, each of length
// `len = N + 1`. Either output may be null to skip it.
//
// # Safety
// Non-null outputs must point to `len` writable doubles.
enum VieStatus vie_solution_nodes(const struct VieSolution *solution,
                                  double *t_out,
                                  double *x_out,
                                  uintptr_t len);

// Piecewise-constant value at `t ∈ [0, T]`.
//
// # Safety
// `solution` must be a live handle and `out` writable.
enum VieStatus vie_solution_evaluate(const struct VieSolution *solution, double t, double *out);

// Maximum nodal error against the problem's exact solution.
//
// # Safety
// Both handles must be live and `out` writable.
enum VieStatus vie_solution_max_error(const struct VieSolution *solution,
                                      const struct VieProblem *problem,
                                      double *out);

// Convergence study over `len` strictly increasing segment counts. Writes
// the actual step and maximum nodal error of each mesh into `h_out` and
// `eps_out` (either may be null).
//
// # Safety
// `sizes` must point to `len` readable values and non-null outputs to `len`
// writable doubles.
enum VieStatus vie_convergence(const struct VieProblem *problem,
                               const uintptr_t *sizes,
                               uintptr_t len,
                               double *h_out,
                               double *eps_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VIE_FFI_H */
