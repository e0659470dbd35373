/* C interface for the resonalyze library. */

#ifndef RESONALYZE_H
#define RESONALYZE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes shared by every fallible entry point.
 */
typedef enum RzStatus {
  RZ_OK = 0,
  RZ_NULL_POINTER = 1,
  RZ_INVALID_UTF8 = 2,
  RZ_INVALID_ARGUMENT = 3,
  RZ_INVALID_STATE = 4,
  RZ_INSUFFICIENT_DATA = 5,
  RZ_NOT_APPLICABLE = 6,
  RZ_NO_EXACT_REPRESENTATION = 7,
  RZ_ACCURACY_FAILURE = 8,
  RZ_POLE_PROXIMITY = 9,
  RZ_UNSUPPORTED = 10,
} RzStatus;

/**
 * Classification result handle.
 */
typedef struct RzClassification RzClassification;

/**
 * Periodic forcing handle.
 */
typedef struct RzForcing RzForcing;

/**
 * Exact solution evaluator handle.
 */
typedef struct RzSolver RzSolver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for this thread, or NULL when no error occurred.
 * The caller owns the returned string and must free it with
 * `rz_string_free`.
 */
char *rz_last_error_message(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned by a `resonalyze` function, or
 * NULL, and must not have been freed already.
 */
void rz_string_free(char *s);

/**
 * Build a forcing from its JSON description, e.g.
 * `{"builtin": "triangle", "params": {"period": "4"}}` or a piecewise
 * `{"period": ..., "segments": [...]}` object (the scenario `forcing`
 * field schema).
 *
 * # Safety
 * `spec_json` must be a valid NUL-terminated string and `out` a valid
 * pointer; the handle written to `*out` must be freed with
 * `rz_forcing_free`.
 */
enum RzStatus rz_forcing_from_json(const char *spec_json, struct RzForcing **out);

/**
 * Evaluate the periodic extension at time t >= 0.
 *
 * # Safety
 * `f` must be a live forcing handle and `out` a valid pointer.
 */
enum RzStatus rz_forcing_evaluate(const struct RzForcing *f, double t, double *out);

/**
 * Minimal period of the forcing, as a float.
 *
 * # Safety
 * `f` must be a live forcing handle and `out` a valid pointer.
 */
enum RzStatus rz_forcing_period(const struct RzForcing *f, double *out);

/**
 * Upper bound on sup |f| over one period.
 *
 * # Safety
 * `f` must be a live forcing handle and `out` a valid pointer.
 */
enum RzStatus rz_forcing_sup_norm(const struct RzForcing *f, double *out);

/**
 * # Safety
 * `f` must come from `rz_forcing_from_json` and not be freed twice.
 */
void rz_forcing_free(struct RzForcing *f);

/**
 * Classify the zero-data response for natural frequency `omega0_text`
 * (ScaledReal text like "1/2*pi"). `q_tol <= 0` selects the default 1e-9.
 *
 * # Safety
 * `f` must be a live forcing handle, `omega0_text` a valid string, and
 * `out` a valid pointer; the handle written to `*out` must be freed with
 * `rz_classification_free`.
 */
enum RzStatus rz_classify(const struct RzForcing *f,
                          const char *omega0_text,
                          double q_tol,
                          struct RzClassification **out);

/**
 * Theorem case id (1..=4), or 0 for a NULL handle.
 *
 * # Safety
 * `c` must be a live classification handle or NULL.
 */
int rz_classification_case(const struct RzClassification *c);

/**
 * Full classification report as a JSON string; free with `rz_string_free`.
 * Returns NULL for a NULL handle.
 *
 * # Safety
 * `c` must be a live classification handle or NULL.
 */
char *rz_classification_json(const struct RzClassification *c);

/**
 * A time t1 with |x(t1)| > level, valid for resonant (case 4) results.
 *
 * # Safety
 * `f` and `c` must be live handles (the same forcing the classification
 * came from) and `out` a valid pointer.
 */
enum RzStatus rz_resonance_witness(const struct RzForcing *f,
                                   const struct RzClassification *c,
                                   double level,
                                   double *out);

/**
 * # Safety
 * `c` must come from `rz_classify` and not be freed twice.
 */
void rz_classification_free(struct RzClassification *c);

/**
 * Exact undamped solver for initial data (x0, x1).
 *
 * # Safety
 * `f` must be a live forcing handle, `omega0_text` a valid string, and
 * `out` a valid pointer; the handle written to `*out` must be freed with
 * `rz_solver_free`.
 */
enum RzStatus rz_solver_new(const struct RzForcing *f,
                            const char *omega0_text,
                            double x0,
                            double x1,
                            struct RzSolver **out);

/**
 * Exact (x, xdot) at time t >= 0; O(1) in the elapsed period count.
 *
 * # Safety
 * `s` must be a live solver handle; `x` and `xdot` valid pointers.
 */
enum RzStatus rz_solver_solve(const struct RzSolver *s, double t, double *x, double *xdot);

/**
 * # Safety
 * `s` must come from `rz_solver_new` and not be freed twice.
 */
void rz_solver_free(struct RzSolver *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RESONALYZE_H */
