#ifndef WEAKLEVY_H
#define WEAKLEVY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum WeakLevyStatus {
  WEAK_LEVY_STATUS_OK = 0,
  WEAK_LEVY_STATUS_NULL_POINTER = 1,
  WEAK_LEVY_STATUS_INVALID_ARGUMENT = 2,
  WEAK_LEVY_STATUS_SPEC = 3,
  WEAK_LEVY_STATUS_NUMERICAL = 4,
  WEAK_LEVY_STATUS_PANIC = 5,
} WeakLevyStatus;

/**
 * Simulation scheme selector.
 */
typedef enum WeakLevyScheme {
  WEAK_LEVY_SCHEME_SUPERPOSITION = 0,
  WEAK_LEVY_SCHEME_MARKED = 1,
  WEAK_LEVY_SCHEME_STRONG = 2,
} WeakLevyScheme;

/**
 * Opaque model handle.
 */
typedef struct WeakLevyModel WeakLevyModel;

/**
 * Opaque handle to simulated paths of `(T, Y)`.
 */
typedef struct WeakLevyPaths WeakLevyPaths;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL after a success.
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *weaklevy_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *weaklevy_version(void);

/**
 * Parses a JSON model document and stores a new handle in `*out`.
 *
 * # Safety
 * `json` must be a NUL-terminated UTF-8 string and `out` a valid pointer.
 * The handle must be released with [`weaklevy_model_free`].
 */
enum WeakLevyStatus weaklevy_model_from_json(const char *json, struct WeakLevyModel **out);

/**
 * Releases a model handle. NULL is ignored.
 *
 * # Safety
 * `model` must come from [`weaklevy_model_from_json`] and not be used afterwards.
 */
void weaklevy_model_free(struct WeakLevyModel *model);

/**
 * Dimension `n` of the model, or 0 for NULL.
 *
 * # Safety
 * `model` must be NULL or a live handle.
 */
size_t weaklevy_model_dim(const struct WeakLevyModel *model);

/**
 * Exponent of `Y` at `theta` (length `n`).
 *
 * # Safety
 * `theta` must hold `len` doubles; `re` and `im` must be writable.
 */
enum WeakLevyStatus weaklevy_model_charfn(const struct WeakLevyModel *model,
                                          const double *theta,
                                          size_t len,
                                          double *re,
                                          double *im);

/**
 * Exponent of `(T, Y)` at `theta = (theta1, theta2)` (length `2n`).
 * `quadrature` selects numerical integration along each ray.
 *
 * # Safety
 * `theta` must hold `len` doubles; `re` and `im` must be writable.
 */
enum WeakLevyStatus weaklevy_model_joint_charfn(const struct WeakLevyModel *model,
                                                const double *theta,
                                                size_t len,
                                                bool quadrature,
                                                double *re,
                                                double *im);

/**
 * Per-unit-time moments. Vectors have length `n`, matrices `n*n` in
 * row-major order; `cov_yt[k*n + l]` is `Cov(Y_k, T_l)`.
 *
 * # Safety
 * Each output must point to writable storage of the stated length.
 */
enum WeakLevyStatus weaklevy_model_moments(const struct WeakLevyModel *model,
                                           double *mean_t,
                                           double *cov_t,
                                           double *mean_y,
                                           double *cov_y,
                                           double *cov_yt);

/**
 * Simulates `paths` paths on a uniform grid of `steps` steps up to `t_max`.
 * `epsilon <= 0` selects the default cutoffs of the marked scheme and must
 * be used with the other schemes.
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer. The handle must
 * be released with [`weaklevy_paths_free`].
 */
enum WeakLevyStatus weaklevy_simulate(const struct WeakLevyModel *model,
                                      enum WeakLevyScheme scheme,
                                      double t_max,
                                      size_t steps,
                                      size_t paths,
                                      uint64_t seed,
                                      double epsilon,
                                      struct WeakLevyPaths **out);

/**
 * Releases a path handle. NULL is ignored.
 *
 * # Safety
 * `paths` must come from [`weaklevy_simulate`] and not be used afterwards.
 */
void weaklevy_paths_free(struct WeakLevyPaths *paths);

/**
 * Number of paths, time steps (excluding `t = 0`) and dimension.
 *
 * # Safety
 * `paths` must be a live handle; the outputs must be writable.
 */
enum WeakLevyStatus weaklevy_paths_shape(const struct WeakLevyPaths *paths,
                                         size_t *n_paths,
                                         size_t *steps,
                                         size_t *dim);

/**
 * Copies the subordinator values, laid out `[path][step][coordinate]`,
 * into `buf` of exactly `paths*steps*dim` doubles.
 *
 * # Safety
 * `paths` must be a live handle and `buf` writable for `len` doubles.
 */
enum WeakLevyStatus weaklevy_paths_copy_t(const struct WeakLevyPaths *paths,
                                          double *buf,
                                          size_t len);

/**
 * Copies the subordinated values `Y`; layout as in [`weaklevy_paths_copy_t`].
 *
 * # Safety
 * `paths` must be a live handle and `buf` writable for `len` doubles.
 */
enum WeakLevyStatus weaklevy_paths_copy_y(const struct WeakLevyPaths *paths,
                                          double *buf,
                                          size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WEAKLEVY_H */
