#ifndef ISOEXT_H
#define ISOEXT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every call.
typedef enum IsoStatus {
  ISO_STATUS_OK = 0,
  ISO_STATUS_NULL_POINTER = 1,
  ISO_STATUS_INVALID_ARGUMENT = 2,
  ISO_STATUS_DIMENSION_MISMATCH = 3,
  ISO_STATUS_PARSE_ERROR = 4,
  ISO_STATUS_FIXTURE_ERROR = 5,
  ISO_STATUS_CLASSIFY_FAILED = 6,
  ISO_STATUS_INTERNAL = 7,
} IsoStatus;

// Which member of the dame pair to build.
typedef enum IsoDame {
  ISO_DAME_A = 0,
  ISO_DAME_B = 1,
} IsoDame;

// The four canonical forms, plus the no-fit verdict.
typedef enum IsoForm {
  ISO_FORM_SIMILARITY_LINEAR = 0,
  ISO_FORM_TRANSPOSE_LINEAR = 1,
  ISO_FORM_SIMILARITY_CONJUGATE = 2,
  ISO_FORM_TRANSPOSE_CONJUGATE = 3,
  ISO_FORM_NO_FORM_FITS = 4,
} IsoForm;

// Opaque algebra handle.
typedef struct IsoAlgebra IsoAlgebra;

// `out = S(in)` for an `n x n` complex matrix, row-major interleaved.
typedef void (*IsoMatrixMap)(const double *input, double *output, size_t n, void *user);

// Outcome of [`iso_classify_matrix`].
typedef struct IsoClassification {
  enum IsoForm form;
  double residual;
  double condition_number;
  double hypothesis_residuals[4];
} IsoClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// `M_n` with the spectral norm.
//
// # Safety
// `out` must be valid for a pointer write.
enum IsoStatus iso_algebra_matrix(size_t n, struct IsoAlgebra **out);

// Functions on `k` points with the sup norm.
//
// # Safety
// `out` must be valid for a pointer write.
enum IsoStatus iso_algebra_function(size_t k, struct IsoAlgebra **out);

// One of the two four-dimensional dame algebras.
//
// # Safety
// `out` must be valid for a pointer write.
enum IsoStatus iso_algebra_dame(enum IsoDame which, struct IsoAlgebra **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `alg` must come from an `iso_algebra_*` constructor and not be freed twice.
void iso_algebra_free(struct IsoAlgebra *alg);

// Complex dimension, or 0 for a null handle.
//
// # Safety
// `alg` must be null or a live handle.
size_t iso_algebra_dim(const struct IsoAlgebra *alg);

// Algebra norm of an element.
//
// # Safety
// `coords` must point to `len` doubles and `out` must be writable.
enum IsoStatus iso_element_norm(const struct IsoAlgebra *alg,
                                const double *coords,
                                size_t len,
                                double *out);

// Spectral radius of an element.
//
// # Safety
// `coords` must point to `len` doubles and `out` must be writable.
enum IsoStatus iso_spectral_radius(const struct IsoAlgebra *alg,
                                   const double *coords,
                                   size_t len,
                                   double *out);

// Dimension of the radical.
//
// # Safety
// `alg` must be a live handle and `out` writable.
enum IsoStatus iso_radical_dim(const struct IsoAlgebra *alg, size_t *out);

// Classifies the map `S` on invertible `n x n` matrices into one of the four
// forms and writes the normalized `U` into `u_out` (`2 * n * n` doubles).
//
// # Safety
// `map` must be safe to call with buffers of `2 * n * n` doubles; `result`
// and `u_out` must be writable.
enum IsoStatus iso_classify_matrix(IsoMatrixMap map,
                                   void *user,
                                   size_t n,
                                   size_t samples,
                                   uint64_t seed,
                                   struct IsoClassification *result,
                                   double *u_out);

// Runs a scenario given as JSON text. When `use_seed` is false the
// scenario's own seed applies. The report JSON is returned in `report_out`
// and must be released with [`iso_string_free`].
//
// # Safety
// `json` must be a nul-terminated string; outputs must be writable.
enum IsoStatus iso_run_scenario_json(const char *json,
                                     bool use_seed,
                                     uint64_t seed,
                                     char **report_out,
                                     bool *all_match);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void iso_string_free(char *s);

// Message for the last failed call on this thread; empty after a success.
// Valid until the next call on the same thread.
const char *iso_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ISOEXT_H */
