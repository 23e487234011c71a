#ifndef ACA_H
#define ACA_H

/* Generated by cbindgen from the aca-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes mirroring the error classes of the core library. The numeric
// values match the CLI exit codes for the same failures.
typedef enum {
  // Call succeeded.
  ACA_STATUS_OK = 0,
  // A required pointer argument was null.
  ACA_STATUS_NULL_POINTER = 1,
  // Arguments were malformed: bad sizes, a zero component count, an
  // invalid optimizer setting.
  ACA_STATUS_INVALID_INPUT = 2,
  // Data rejected: non-finite entries, dimension mismatch, unreadable or
  // malformed model file.
  ACA_STATUS_DATA_ERROR = 3,
  // Numerical failure inside the search.
  ACA_STATUS_NUMERIC_ERROR = 4,
  // The library panicked; the operation did not complete.
  ACA_STATUS_PANIC = 5,
} AcaStatus;

// Opaque owner of a fitted model. C callers only ever hold a pointer to it.
typedef struct AcaModel AcaModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Pointer to the message describing the most recent failure on this thread,
// or an empty string after a success. The pointer stays valid until the next
// library call from the same thread.
const char *aca_last_error_message(void);

// Fits an anomaly component model and stores the handle in `*out`.
//
// `data` holds `nrows * ncols` doubles, row-major. `components` directions
// are extracted (1 <= components <= ncols). `asymmetric` selects the
// one-sided depth notion when nonzero. `budget_k` and `restarts` bound the
// per-query search (pass 1000 and 10 for the defaults); `seed` fixes the
// whole fit deterministically.
//
// # Safety
// `data` must point to `nrows * ncols` readable doubles and `out` must be a
// valid location to store the handle.
AcaStatus aca_fit(const double *data,
                  size_t nrows,
                  size_t ncols,
                  size_t components,
                  int32_t asymmetric,
                  size_t budget_k,
                  size_t restarts,
                  uint64_t seed,
                  AcaModel **out);

// Releases a model returned by `aca_fit` or `aca_model_load`. Passing
// null is a no-op.
//
// # Safety
// `model` must be a pointer previously returned by this library and not yet
// freed.
void aca_model_free(AcaModel *model);

// Number of input variables the model was fitted on, or 0 for null.
//
// # Safety
// `model` must be null or a live handle from this library.
size_t aca_model_ambient_dim(const AcaModel *model);

// Number of fitted components, or 0 for null.
//
// # Safety
// `model` must be null or a live handle from this library.
size_t aca_model_num_components(const AcaModel *model);

// Copies the component directions into `out`, row-major with one unit
// direction per row: `num_components * ambient_dim` doubles.
//
// # Safety
// `model` must be a live handle and `out` must have room for
// `num_components * ambient_dim` doubles.
AcaStatus aca_model_components(const AcaModel *model, double *out);

// Copies the per-component minimized depths into `out`
// (`num_components` doubles, nondecreasing).
//
// # Safety
// `model` must be a live handle and `out` must have room for
// `num_components` doubles.
AcaStatus aca_model_min_depths(const AcaModel *model, double *out);

// Projects `nrows` data rows onto the fitted components, writing
// `nrows * num_components` doubles to `out` (row-major scores).
//
// # Safety
// `data` must hold `nrows * ncols` doubles, `out` must have room for
// `nrows * num_components` doubles, and `model` must be a live handle.
AcaStatus aca_transform(const AcaModel *model,
                        const double *data,
                        size_t nrows,
                        size_t ncols,
                        double *out);

// Approximate projection depth of one point relative to a dataset, searched
// over the full ambient space. Writes the depth to `*out_depth` and, when
// `out_direction` is non-null, the minimizing unit direction to
// `out_direction[0..ncols]`.
//
// # Safety
// `point` must hold `ncols` doubles, `data` must hold `nrows * ncols`
// doubles, `out_depth` must be writable, and `out_direction` must be null or
// have room for `ncols` doubles.
AcaStatus aca_proj_depth(const double *point,
                         const double *data,
                         size_t nrows,
                         size_t ncols,
                         int32_t asymmetric,
                         size_t budget_k,
                         size_t restarts,
                         uint64_t seed,
                         double *out_depth,
                         double *out_direction);

// Saves the model as JSON at the NUL-terminated UTF-8 `path`.
//
// # Safety
// `model` must be a live handle and `path` a NUL-terminated string.
AcaStatus aca_model_save(const AcaModel *model, const char *path);

// Loads a model saved by `aca_model_save` and stores the handle in `*out`.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid location to
// store the handle.
AcaStatus aca_model_load(const char *path, AcaModel **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ACA_H */
