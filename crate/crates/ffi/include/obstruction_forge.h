#ifndef OBSTRUCTION_FORGE_H
#define OBSTRUCTION_FORGE_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/*
 Result codes.
 */
typedef enum of_status {
  OF_STATUS_OK = 0,
  OF_STATUS_NULL_POINTER = 1,
  OF_STATUS_INVALID_UTF8 = 2,
  /*
   The model text is not well-formed or violates the schema.
   */
  OF_STATUS_PARSE = 3,
  /*
   An argument or model reference is invalid.
   */
  OF_STATUS_INVALID_INPUT = 4,
  /*
   A structural check failed while computing the report.
   */
  OF_STATUS_CHECK_FAILED = 5,
  /*
   A panic was caught at the boundary.
   */
  OF_STATUS_INTERNAL = 6,
} of_status;

/*
 Opaque model handle.
 */
typedef struct of_model of_model;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or null. The pointer is
 valid until the next call into the library on the same thread.
 */
const char *of_last_error(void);

/*
 Releases a string returned by the library. Null is ignored.

 # Safety
 `s` must come from this library and must not be used afterwards.
 */
void of_string_free(char *s);

/*
 Library version as a static NUL-terminated string.
 */
const char *of_version(void);

/*
 Parses a JSON model. On success `*out` receives a handle to release with
 [`of_model_free`].

 # Safety
 `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum of_status of_model_parse(const char *json, struct of_model **out);

/*
 # Safety
 `m` must be null or a handle from [`of_model_parse`] not yet freed.
 */
void of_model_free(struct of_model *m);

/*
 Canonical JSON text of the model.

 # Safety
 `m` must be a live handle and `out` a writable pointer.
 */
enum of_status of_model_serialize(const struct of_model *m, char **out);

/*
 Static consistency report. `*passed` (if non-null) receives the verdict.

 # Safety
 `m` must be a live handle and `out` a writable pointer.
 */
enum of_status of_validate(const struct of_model *m, uintptr_t cap, char **out, bool *passed);

/*
 Generated curves, their transition matrix and exact contraction verdict.

 # Safety
 `m` must be a live handle and `out` a writable pointer.
 */
enum of_status of_gamma(const struct of_model *m, char **out, bool *contracting);

/*
 Enumerates stable multicurves. `*obstructed` (if non-null) receives the
 verdict.

 # Safety
 `m` must be a live handle and `out` a writable pointer.
 */
enum of_status of_obstruction(const struct of_model *m,
                              uintptr_t cap,
                              double tol,
                              char **out,
                              bool *obstructed);

/*
 Piece dynamics, boundary classes and renormalizations.

 # Safety
 `m` must be a live handle and `out` a writable pointer.
 */
enum of_status of_decompose(const struct of_model *m, char **out);

/*
 Graphviz text of the piece map.

 # Safety
 `m` must be a live handle and `out` a writable pointer.
 */
enum of_status of_decompose_dot(const struct of_model *m, char **out);

/*
 Reduction identity for a comma-separated multicurve.

 # Safety
 `m` must be a live handle, `curves` a NUL-terminated string and `out` a
 writable pointer.
 */
enum of_status of_reduce(const struct of_model *m,
                         const char *curves,
                         double tol,
                         char **out,
                         bool *passed);

/*
 Whole-model verdict against the per-cycle verdicts.

 # Safety
 `m` must be a live handle and `out` a writable pointer.
 */
enum of_status of_combine(const struct of_model *m,
                          uintptr_t cap,
                          double tol,
                          char **out,
                          bool *agree);

/*
 Weight pipeline and Grötzsch certificate. `grotzsch_default` may be null;
 otherwise it is a rational used for annular pieces without a constant.

 # Safety
 `m` must be a live handle, `grotzsch_default` null or a NUL-terminated
 string, and `out` a writable pointer.
 */
enum of_status of_certify(const struct of_model *m,
                          const char *grotzsch_default,
                          char **out,
                          bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OBSTRUCTION_FORGE_H */
