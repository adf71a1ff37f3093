#ifndef ITFS_H
#define ITFS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum ItfsCriterion {
  ITFS_CRITERION_MIM = 0,
  ITFS_CRITERION_MIFS = 1,
  ITFS_CRITERION_JMI = 2,
  ITFS_CRITERION_CMI = 3,
  ITFS_CRITERION_MRMR = 4,
  ITFS_CRITERION_CMIM = 5,
  ITFS_CRITERION_IF = 6,
  ITFS_CRITERION_ICAP = 7,
} ItfsCriterion;

typedef enum ItfsStatus {
  ITFS_STATUS_OK = 0,
  ITFS_STATUS_NULL_POINTER = 1,
  ITFS_STATUS_INVALID_ARGUMENT = 2,
  ITFS_STATUS_IO = 3,
  ITFS_STATUS_DATA = 4,
  ITFS_STATUS_INTERNAL = 5,
} ItfsStatus;

/**
 * A loaded dataset.
 */
typedef struct ItfsDataset ItfsDataset;

/**
 * The ordered output of one selection run.
 */
typedef struct ItfsSelection ItfsSelection;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies a row-major `n_rows x n_cols` matrix of discrete symbols.
 *
 * # Safety
 * `values` must point to `n_rows * n_cols` readable `u32`s and `out` must
 * be a valid pointer.
 */
enum ItfsStatus itfs_dataset_from_dense(const uint32_t *values,
                                        size_t n_rows,
                                        size_t n_cols,
                                        size_t class_index,
                                        struct ItfsDataset **out);

/**
 * Loads a CSV file. A negative `label_position` selects the last column;
 * `bins == 0` disables discretization.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ItfsStatus itfs_dataset_load_csv(const char *path,
                                      ptrdiff_t label_position,
                                      size_t bins,
                                      struct ItfsDataset **out);

/**
 * Loads a LibSVM file into the sparse layout; `bins == 0` disables
 * discretization.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ItfsStatus itfs_dataset_load_libsvm(const char *path, size_t bins, struct ItfsDataset **out);

/**
 * # Safety
 * `dataset` must come from an `itfs_dataset_*` constructor and not be
 * freed twice. Null is ignored.
 */
void itfs_dataset_free(struct ItfsDataset *dataset);

/**
 * Number of input features, excluding the class.
 *
 * # Safety
 * `dataset` must be a live handle and `out` a valid pointer.
 */
enum ItfsStatus itfs_dataset_n_features(const struct ItfsDataset *dataset, size_t *out);

/**
 * # Safety
 * `dataset` must be a live handle and `out` a valid pointer.
 */
enum ItfsStatus itfs_dataset_n_instances(const struct ItfsDataset *dataset, size_t *out);

/**
 * Runs greedy selection of up to `ns` features. `npart == 0` and
 * `workers == 0` pick defaults; a NaN `beta` keeps the criterion's own
 * weight (only MIFS accepts another value).
 *
 * # Safety
 * `dataset` must be a live handle and `out` a valid pointer.
 */
enum ItfsStatus itfs_select(const struct ItfsDataset *dataset,
                            enum ItfsCriterion criterion,
                            size_t ns,
                            size_t npart,
                            size_t workers,
                            double beta,
                            struct ItfsSelection **out);

/**
 * Number of selected features; zero for a null handle.
 *
 * # Safety
 * `selection` must be a live handle or null.
 */
size_t itfs_selection_len(const struct ItfsSelection *selection);

/**
 * Feature id and score at `rank` (0-based). Either output may be null.
 *
 * # Safety
 * `selection` must be a live handle; non-null outputs must be valid.
 */
enum ItfsStatus itfs_selection_get(const struct ItfsSelection *selection,
                                   size_t rank,
                                   uint32_t *feature,
                                   double *score);

/**
 * # Safety
 * `selection` must come from [`itfs_select`] and not be freed twice.
 * Null is ignored.
 */
void itfs_selection_free(struct ItfsSelection *selection);

/**
 * Message for the last failed call on this thread, or null if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *itfs_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ITFS_H */
