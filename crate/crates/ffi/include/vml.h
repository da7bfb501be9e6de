#ifndef VML_H
#define VML_H

/* Generated by cbindgen; do not edit. */

#include <stdbool.h>
#include <stddef.h>

typedef enum VmlStatus {
  VML_STATUS_OK = 0,
  VML_STATUS_NULL_ARGUMENT = 1,
  VML_STATUS_INVALID_UTF8 = 2,
  /**
   * The model has errors; the last error lists them.
   */
  VML_STATUS_DIAGNOSTICS = 3,
  VML_STATUS_UNKNOWN_CONTEXT = 4,
  VML_STATUS_SOLVE_FAILED = 5,
  VML_STATUS_EMIT_FAILED = 6,
  VML_STATUS_OUT_OF_RANGE = 7,
  VML_STATUS_PANIC = 8,
} VmlStatus;

/**
 * A compiled model and its current context values.
 */
typedef struct VmlModel VmlModel;

typedef struct VmlSolution VmlSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *vml_last_error(void);

/**
 * Parses, analyzes and compiles `source`; on success `*out` receives a
 * model to release with [`vml_model_free`].
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` a valid pointer.
 */
enum VmlStatus vml_model_from_source(const char *source, struct VmlModel **out);

/**
 * # Safety
 * `model` must come from [`vml_model_from_source`] and not be used after.
 */
void vml_model_free(struct VmlModel *model);

/**
 * Sets a context value; out-of-range values are clamped when solving.
 *
 * # Safety
 * `model` must be a live model and `name` a NUL-terminated string.
 */
enum VmlStatus vml_model_set_context(struct VmlModel *model, const char *name, double value);

/**
 * Solves for the contexts set so far. An infeasible problem still yields a
 * solution; check [`vml_solution_is_optimal`].
 *
 * # Safety
 * `model` must be a live model and `out` a valid pointer.
 */
enum VmlStatus vml_model_solve(const struct VmlModel *model, struct VmlSolution **out);

/**
 * # Safety
 * `solution` must be a live solution or NULL.
 */
size_t vml_solution_binding_count(const struct VmlSolution *solution);

/**
 * The `index`-th binding, in declaration order. Enum values are reported
 * as their literal's position. `*name` stays valid while the solution is.
 *
 * # Safety
 * `solution` must be live; `name` and `value` valid pointers.
 */
enum VmlStatus vml_solution_binding(const struct VmlSolution *solution,
                                    size_t index,
                                    const char **name,
                                    double *value);

/**
 * The minimized cost, or NaN when infeasible.
 *
 * # Safety
 * `solution` must be a live solution or NULL.
 */
double vml_solution_objective(const struct VmlSolution *solution);

/**
 * # Safety
 * `solution` must be a live solution or NULL.
 */
bool vml_solution_is_optimal(const struct VmlSolution *solution);

/**
 * # Safety
 * `solution` must come from [`vml_model_solve`] and not be used after.
 */
void vml_solution_free(struct VmlSolution *solution);

/**
 * MiniZinc text for the model; release it with [`vml_string_free`].
 *
 * # Safety
 * `model` must be a live model and `out` a valid pointer.
 */
enum VmlStatus vml_model_emit_minizinc(const struct VmlModel *model, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used after.
 */
void vml_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VML_H */
