#ifndef STREAMCLUST_H
#define STREAMCLUST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ScStatus {
  SC_STATUS_OK = 0,
  SC_STATUS_NULL_POINTER = 1,
  SC_STATUS_INVALID_ARGUMENT = 2,
  SC_STATUS_IO = 3,
  SC_STATUS_PARSE = 4,
  SC_STATUS_BAD_MAGIC = 5,
  SC_STATUS_VERSION_MISMATCH = 6,
  SC_STATUS_CORRUPT_FILE = 7,
  SC_STATUS_MISSING_EMBEDDING = 8,
  SC_STATUS_DIMENSION_MISMATCH = 9,
  SC_STATUS_DATA = 10,
  SC_STATUS_PANIC = 11,
} ScStatus;

/**
 * A trained model bundle.
 */
typedef struct ScBundle ScBundle;

/**
 * An online clustering session.
 */
typedef struct ScEngine ScEngine;

typedef struct ScAssignment {
  uint64_t cluster_id;
  /**
   * 1 when the document opened a new cluster.
   */
  int32_t created;
  double c_score;
  double creation_prob;
} ScAssignment;

typedef struct ScPrf {
  double precision;
  double recall;
  double f1;
} ScPrf;

typedef struct ScMetrics {
  struct ScPrf bcubed;
  struct ScPrf ceaf_e;
  struct ScPrf ceaf_m;
  struct ScPrf muc;
  struct ScPrf blanc;
  double homogeneity;
  double completeness;
  double v_measure;
  double adjusted_rand;
  double adjusted_mutual_information;
  double fowlkes_mallows;
  double rand_index;
} ScMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL after a
 * successful call. Valid until the next call on the same thread.
 */
const char *sc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sc_version(void);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum ScStatus sc_bundle_load(const char *path, struct ScBundle **out);

/**
 * # Safety
 * `bundle` must come from [`sc_bundle_load`] and not be used afterwards.
 */
void sc_bundle_free(struct ScBundle *bundle);

/**
 * # Safety
 * `bundle` must be a live handle and `out` a writable pointer.
 */
enum ScStatus sc_bundle_embedding_dim(const struct ScBundle *bundle, size_t *out);

/**
 * Copies the 13 feature weights into `out`, which must hold `len >= 13`
 * doubles.
 *
 * # Safety
 * `bundle` must be a live handle and `out` must point to `len` doubles.
 */
enum ScStatus sc_bundle_weights(const struct ScBundle *bundle, double *out, size_t len);

/**
 * Starts an empty session with a copy of `bundle` and the TF-IDF models in
 * `tfidf_path`.
 *
 * # Safety
 * `bundle` must be a live handle, `tfidf_path` a NUL-terminated string and
 * `out` a writable pointer.
 */
enum ScStatus sc_engine_new(const struct ScBundle *bundle,
                            const char *tfidf_path,
                            struct ScEngine **out);

/**
 * # Safety
 * `engine` must come from [`sc_engine_new`] and not be used afterwards.
 */
void sc_engine_free(struct ScEngine *engine);

/**
 * Clusters one document given as raw text, a Unix timestamp in seconds and
 * its embedding of `dim` floats.
 *
 * # Safety
 * Strings must be NUL-terminated, `embedding` must point to `dim` floats and
 * `out` must be writable.
 */
enum ScStatus sc_engine_step(struct ScEngine *engine,
                             const char *doc_id,
                             const char *title,
                             const char *body,
                             int64_t timestamp,
                             const float *embedding,
                             size_t dim,
                             struct ScAssignment *out);

/**
 * # Safety
 * `engine` must be a live handle and `out` a writable pointer.
 */
enum ScStatus sc_engine_cluster_count(const struct ScEngine *engine, size_t *out);

/**
 * Scores a predicted labeling against gold labels over the same `n >= 2`
 * documents. Labels are arbitrary integers.
 *
 * # Safety
 * `pred` and `gold` must point to `n` values and `out` must be writable.
 */
enum ScStatus sc_evaluate(const uint64_t *pred,
                          const uint64_t *gold,
                          size_t n,
                          struct ScMetrics *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STREAMCLUST_H */
