#ifndef STANCEFOREST_H
#define STANCEFOREST_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SfStatus {
  SF_STATUS_OK = 0,
  SF_STATUS_NULL_POINTER = 1,
  SF_STATUS_INVALID_ARGUMENT = 2,
  SF_STATUS_IO = 3,
  SF_STATUS_FORMAT = 4,
  SF_STATUS_DIM_MISMATCH = 5,
  SF_STATUS_BUFFER_TOO_SMALL = 6,
  SF_STATUS_PANIC = 7,
} SfStatus;

/**
 * Embedding table read from a `CEV1` file. Opaque.
 */
typedef struct SfEmbeddings SfEmbeddings;

/**
 * Trained forest. Opaque.
 */
typedef struct SfModel SfModel;

/**
 * Forest hyper-parameters. `max_depth` 0 means unlimited; `max_features`
 * 0 means floor(sqrt(dim)).
 */
typedef struct SfForestParams {
  size_t n_trees;
  size_t max_depth;
  size_t min_samples_split;
  size_t max_features;
  uint64_t seed;
  bool bootstrap;
} SfForestParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failed call on this thread, or NULL.
 * Valid until the next `sf_*` call on the same thread.
 */
const char *sf_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sf_version(void);

struct SfForestParams sf_forest_params_default(void);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum SfStatus sf_model_load_file(const char *path, struct SfModel **out);

/**
 * # Safety
 * `data` must point to `len` readable bytes and `out` be writable.
 */
enum SfStatus sf_model_load_bytes(const uint8_t *data, size_t len, struct SfModel **out);

/**
 * Fits a forest on `n_rows` row-major rows of `dim` floats.
 *
 * # Safety
 * `rows` must hold `n_rows * dim` floats, `labels` `n_rows` codes, and
 * `params` may be NULL for defaults.
 */
enum SfStatus sf_model_fit(const float *rows,
                           const uint8_t *labels,
                           size_t n_rows,
                           size_t dim,
                           const struct SfForestParams *params,
                           struct SfModel **out);

/**
 * Serialises the model as JSON into `buf` (NUL-terminated).
 *
 * # Safety
 * `buf` must have room for `cap` bytes; `needed` may be NULL.
 */
enum SfStatus sf_model_to_json(const struct SfModel *model, char *buf, size_t cap, size_t *needed);

/**
 * Feature dimension, or 0 for a NULL handle.
 *
 * # Safety
 * `model` must be NULL or a live handle.
 */
size_t sf_model_dim(const struct SfModel *model);

/**
 * # Safety
 * `model` must be NULL or a live handle.
 */
size_t sf_model_n_trees(const struct SfModel *model);

/**
 * # Safety
 * `x` must hold `dim` floats and `out_label` be writable.
 */
enum SfStatus sf_model_predict(const struct SfModel *model,
                               const float *x,
                               size_t dim,
                               uint8_t *out_label);

/**
 * Writes the three class probabilities (vote shares) to `out`.
 *
 * # Safety
 * `x` must hold `dim` floats and `out` have room for 3 doubles.
 */
enum SfStatus sf_model_predict_proba(const struct SfModel *model,
                                     const float *x,
                                     size_t dim,
                                     double *out);

/**
 * Labels `n_rows` row-major rows.
 *
 * # Safety
 * `rows` must hold `n_rows * dim` floats and `out_labels` `n_rows` bytes.
 */
enum SfStatus sf_model_predict_batch(const struct SfModel *model,
                                     const float *rows,
                                     size_t n_rows,
                                     size_t dim,
                                     uint8_t *out_labels);

/**
 * # Safety
 * `model` must be NULL or a handle not freed before.
 */
void sf_model_free(struct SfModel *model);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum SfStatus sf_embeddings_load_file(const char *path, struct SfEmbeddings **out);

/**
 * # Safety
 * `data` must point to `len` readable bytes and `out` be writable.
 */
enum SfStatus sf_embeddings_read(const uint8_t *data, size_t len, struct SfEmbeddings **out);

/**
 * # Safety
 * `emb` must be NULL or a live handle.
 */
size_t sf_embeddings_len(const struct SfEmbeddings *emb);

/**
 * # Safety
 * `emb` must be NULL or a live handle.
 */
size_t sf_embeddings_dim(const struct SfEmbeddings *emb);

/**
 * Variant tag: 0 bert, 1 elmo, 2 combined, 3 synthetic; 255 for NULL.
 *
 * # Safety
 * `emb` must be NULL or a live handle.
 */
uint8_t sf_embeddings_variant(const struct SfEmbeddings *emb);

/**
 * Pointer to row `i` (`dim` floats, owned by the handle), or NULL when
 * out of range.
 *
 * # Safety
 * `emb` must be NULL or a live handle.
 */
const float *sf_embeddings_row(const struct SfEmbeddings *emb, size_t i);

/**
 * Copies the id of row `i` into `buf` (NUL-terminated).
 *
 * # Safety
 * `buf` must have room for `cap` bytes; `needed` may be NULL.
 */
enum SfStatus sf_embeddings_id(const struct SfEmbeddings *emb,
                               size_t i,
                               char *buf,
                               size_t cap,
                               size_t *needed);

/**
 * # Safety
 * `emb` must be NULL or a handle not freed before.
 */
void sf_embeddings_free(struct SfEmbeddings *emb);

double sf_mcc_binary(uint64_t tp, uint64_t tn, uint64_t fp, uint64_t fn_);

/**
 * Tallies a 3×3 confusion matrix, row-major `[true][predicted]`, into `out`.
 *
 * # Safety
 * `y_true` and `y_pred` must hold `n` codes; `out` room for 9 values.
 */
enum SfStatus sf_confusion(const uint8_t *y_true, const uint8_t *y_pred, size_t n, uint64_t *out);

/**
 * Weighted F1, macro F1 and multiclass MCC of a row-major 3×3 matrix.
 * Any output pointer may be NULL.
 *
 * # Safety
 * `cm` must hold 9 values.
 */
enum SfStatus sf_scores(const uint64_t *cm, double *f1_weighted, double *f1_macro, double *mcc);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STANCEFOREST_H */
