#ifndef SCATTER_TEX_H
#define SCATTER_TEX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum StStatus {
  ST_STATUS_OK = 0,
  ST_STATUS_NULL_POINTER = 1,
  ST_STATUS_INVALID_ARGUMENT = 2,
  ST_STATUS_GEOMETRY = 3,
  ST_STATUS_CONVERSION = 4,
  ST_STATUS_UNSUPPORTED = 5,
  ST_STATUS_SPLIT = 6,
  ST_STATUS_IO = 7,
  ST_STATUS_BUFFER_TOO_SMALL = 8,
  ST_STATUS_PANIC = 9,
} StStatus;

/**
 * Fitted per-class PCA classifier.
 */
typedef struct StClassifier StClassifier;

/**
 * Filter bank on a fixed grid.
 */
typedef struct StFilterBank StFilterBank;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *st_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *st_version(void);

/**
 * Number of planes produced for colour space `tag` (e.g. "opponent").
 *
 * # Safety
 * `tag` must be a NUL-terminated string and `out` writable.
 */
enum StStatus st_channel_count(const char *tag, size_t *out);

/**
 * Converts an interleaved RGB image (`width * height * 3` samples in
 * [0, 255]) to `tag`. Output is planar: channel `c` occupies
 * `out[c * width * height ..]`.
 *
 * # Safety
 * `rgb` must hold `width * height * 3` doubles, `out` `capacity` doubles,
 * `tag` must be NUL-terminated; `written` may be NULL.
 */
enum StStatus st_convert(const double *rgb,
                         size_t width,
                         size_t height,
                         const char *tag,
                         double *out,
                         size_t capacity,
                         size_t *written);

/**
 * Number of scattering paths for `scales`, `angles` and `max_order` <= 2.
 */
size_t st_path_count(size_t scales, size_t angles, size_t max_order);

/**
 * Filter bank on an explicit `width x height` grid.
 *
 * # Safety
 * `out` must be writable. Release the handle with [`st_filter_bank_free`].
 */
enum StStatus st_filter_bank_new(size_t scales,
                                 size_t angles,
                                 size_t width,
                                 size_t height,
                                 struct StFilterBank **out);

/**
 * Filter bank sized for scattering images of `width x height`.
 *
 * # Safety
 * `out` must be writable. Release the handle with [`st_filter_bank_free`].
 */
enum StStatus st_filter_bank_for_image(size_t width,
                                       size_t height,
                                       size_t scales,
                                       size_t angles,
                                       struct StFilterBank **out);

/**
 * # Safety
 * `bank` must come from a `st_filter_bank_*` constructor, or be NULL.
 */
void st_filter_bank_free(struct StFilterBank *bank);

/**
 * Minimum and maximum of the Littlewood-Paley sum over the bank's grid.
 *
 * # Safety
 * `bank` must be a live handle; `min` and `max` writable.
 */
enum StStatus st_filter_bank_littlewood_paley(const struct StFilterBank *bank,
                                              double *min,
                                              double *max);

/**
 * Scattering coefficients of one `width x height` plane (row-major).
 *
 * # Safety
 * `bank` must be a live handle, `samples` must hold `width * height`
 * doubles, `out` `capacity` doubles; `written` may be NULL.
 */
enum StStatus st_scatter_plane(const struct StFilterBank *bank,
                               const double *samples,
                               size_t width,
                               size_t height,
                               size_t max_order,
                               size_t oversampling,
                               double *out,
                               size_t capacity,
                               size_t *written);

/**
 * Fits a classifier on `n` column vectors of length `dims` stored
 * contiguously (`features[i * dims ..]` is sample `i`), with class labels
 * in `0..n_classes` and `d` principal directions per class.
 *
 * # Safety
 * `features` must hold `n * dims` doubles, `labels` `n` values, `out` must
 * be writable. Release the handle with [`st_classifier_free`].
 */
enum StStatus st_classifier_fit(const double *features,
                                size_t dims,
                                size_t n,
                                const uint32_t *labels,
                                size_t n_classes,
                                size_t d,
                                struct StClassifier **out);

/**
 * # Safety
 * `model` must come from [`st_classifier_fit`], or be NULL.
 */
void st_classifier_free(struct StClassifier *model);

/**
 * Predicted class of one feature vector of length `dims`.
 *
 * # Safety
 * `model` must be a live handle, `x` must hold `dims` doubles and `label`
 * be writable.
 */
enum StStatus st_classifier_predict(const struct StClassifier *model,
                                    const double *x,
                                    size_t dims,
                                    uint32_t *label);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCATTER_TEX_H */
