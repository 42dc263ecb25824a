/* SPDX-License-Identifier: Apache-2.0 */
/*
 * nnsc - nonnegative, non-convex sparse coding for image classification.
 *
 * C API of the shared library. Objects are opaque handles created and
 * destroyed through these functions; every fallible call returns an
 * nnsc_status, and nnsc_last_error() describes the most recent failure on
 * the calling thread.
 */
#ifndef NNSC_H
#define NNSC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NNSC_API __declspec(dllexport)
#else
#define NNSC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nnsc_status {
  NNSC_OK = 0,
  NNSC_ERROR_INVALID_ARGUMENT = 1, /* bad parameters or malformed input data */
  NNSC_ERROR_IO = 2,               /* file open/read/write failure */
  NNSC_ERROR_FORMAT = 3,           /* malformed or truncated binary file */
  NNSC_ERROR_INTERNAL = 4
} nnsc_status;

NNSC_API const char* nnsc_version(void);

/* Message for the last failure on this thread; empty string if none. */
NNSC_API const char* nnsc_last_error(void);

/* Frees strings returned through char** out-parameters. */
NNSC_API void nnsc_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Descriptors                                                        */
/* ------------------------------------------------------------------ */

typedef struct nnsc_descriptors nnsc_descriptors;

/* Dense extraction from a row-major grayscale raster with intensities in
 * [0, 1]. One 128-dimensional descriptor per patch on a (patch, step) grid. */
NNSC_API nnsc_status nnsc_descriptors_extract(const float* pixels, uint32_t width,
                                              uint32_t height, uint32_t patch, uint32_t step,
                                              nnsc_descriptors** out);

/* Extraction straight from a PGM/PPM file, or loading of a .nnsc file. */
NNSC_API nnsc_status nnsc_descriptors_from_file(const char* path, uint32_t patch, uint32_t step,
                                                nnsc_descriptors** out);

NNSC_API nnsc_status nnsc_descriptors_load(const char* path, nnsc_descriptors** out);
NNSC_API nnsc_status nnsc_descriptors_save(const nnsc_descriptors* set, const char* path);
NNSC_API void nnsc_descriptors_free(nnsc_descriptors* set);

NNSC_API uint64_t nnsc_descriptors_count(const nnsc_descriptors* set);
NNSC_API uint32_t nnsc_descriptors_dim(const nnsc_descriptors* set);
/* count*dim row-major values; valid while the handle lives. */
NNSC_API const float* nnsc_descriptors_data(const nnsc_descriptors* set);
/* count*2 (x, y) pairs. */
NNSC_API const float* nnsc_descriptors_locations(const nnsc_descriptors* set);

/* ------------------------------------------------------------------ */
/* Codebook                                                           */
/* ------------------------------------------------------------------ */

typedef struct nnsc_codebook nnsc_codebook;

typedef enum nnsc_codebook_method {
  NNSC_CODEBOOK_KMEANS = 0,
  NNSC_CODEBOOK_SPARSE = 1
} nnsc_codebook_method;

typedef struct nnsc_codebook_options {
  uint32_t size;          /* number of atoms p */
  int method;             /* nnsc_codebook_method */
  double lambda;          /* sparse-coding dictionary learning only */
  uint32_t kmeans_max_iter;
  uint32_t sc_outer_iters;
  uint64_t sample_limit;  /* 0 = use all descriptors */
  uint64_t seed;
  uint32_t workers;       /* 0 = hardware concurrency */
} nnsc_codebook_options;

NNSC_API void nnsc_codebook_options_init(nnsc_codebook_options* opts);

/* Trains on the concatenation of n_sets descriptor sets, sampling down to
 * sample_limit descriptors first when over the limit. */
NNSC_API nnsc_status nnsc_codebook_train(const nnsc_descriptors* const* sets, size_t n_sets,
                                         const nnsc_codebook_options* opts, nnsc_codebook** out);

NNSC_API nnsc_status nnsc_codebook_load(const char* path, nnsc_codebook** out);
NNSC_API nnsc_status nnsc_codebook_save(const nnsc_codebook* cb, const char* path);
NNSC_API void nnsc_codebook_free(nnsc_codebook* cb);

NNSC_API uint32_t nnsc_codebook_dim(const nnsc_codebook* cb);
NNSC_API uint32_t nnsc_codebook_size(const nnsc_codebook* cb);
/* Pyramid feature length for this codebook: 21 * size. */
NNSC_API uint32_t nnsc_codebook_feature_dim(const nnsc_codebook* cb);

/* ------------------------------------------------------------------ */
/* Coding                                                             */
/* ------------------------------------------------------------------ */

typedef enum nnsc_coding_mode {
  NNSC_MODE_SC = 0,   /* signed l1 */
  NNSC_MODE_NSC = 1,  /* nonnegative l1 */
  NNSC_MODE_NNSC = 2  /* nonnegative l1 + support-detection outer loop */
} nnsc_coding_mode;

typedef struct nnsc_solver_options {
  double lambda;
  double beta;            /* support-detection threshold decay */
  double inner_tol;       /* KKT residual target */
  uint32_t inner_max_iter;
  uint32_t outer_max_iter;
} nnsc_solver_options;

NNSC_API void nnsc_solver_options_init(nnsc_solver_options* opts);

/* Codes one descriptor x of length nnsc_codebook_dim(cb). alpha receives
 * nnsc_codebook_size(cb) coefficients; objective / kkt_residual / converged
 * may be NULL. */
NNSC_API nnsc_status nnsc_solve(const nnsc_codebook* cb, const double* x, size_t x_len,
                                nnsc_coding_mode mode, const nnsc_solver_options* opts,
                                double* alpha, double* objective, double* kkt_residual,
                                int* converged);

/* Codes every descriptor and max-pools over the spatial pyramid. feature
 * receives nnsc_codebook_feature_dim(cb) values. */
NNSC_API nnsc_status nnsc_encode_image(const nnsc_codebook* cb, const nnsc_descriptors* set,
                                       nnsc_coding_mode mode, const nnsc_solver_options* opts,
                                       uint32_t workers, float* feature);

/* ------------------------------------------------------------------ */
/* Features                                                           */
/* ------------------------------------------------------------------ */

typedef struct nnsc_features nnsc_features;

NNSC_API nnsc_status nnsc_features_create(uint32_t dim, nnsc_features** out);
NNSC_API nnsc_status nnsc_features_append(nnsc_features* set, const float* row, uint32_t label);
NNSC_API nnsc_status nnsc_features_load(const char* path, nnsc_features** out);
NNSC_API nnsc_status nnsc_features_save(const nnsc_features* set, const char* path);
NNSC_API void nnsc_features_free(nnsc_features* set);

NNSC_API uint64_t nnsc_features_count(const nnsc_features* set);
NNSC_API uint32_t nnsc_features_dim(const nnsc_features* set);
NNSC_API const float* nnsc_features_data(const nnsc_features* set);
NNSC_API const uint32_t* nnsc_features_labels(const nnsc_features* set);

/* ------------------------------------------------------------------ */
/* Classifier                                                         */
/* ------------------------------------------------------------------ */

typedef struct nnsc_model nnsc_model;

/* One-vs-rest linear SVM (squared hinge, L2 regularised). class_names has
 * n_classes entries and labels in the feature set must be < n_classes. */
NNSC_API nnsc_status nnsc_model_train(const nnsc_features* set, const char* const* class_names,
                                      uint32_t n_classes, double reg_c, uint32_t epochs,
                                      uint64_t seed, uint32_t workers, nnsc_model** out);

/* labels receives row_count entries. */
NNSC_API nnsc_status nnsc_model_predict(const nnsc_model* model, const float* rows,
                                        size_t row_count, uint32_t dim, uint32_t* labels);

NNSC_API nnsc_status nnsc_model_load(const char* path, nnsc_model** out);
NNSC_API nnsc_status nnsc_model_save(const nnsc_model* model, const char* path);
NNSC_API void nnsc_model_free(nnsc_model* model);

NNSC_API uint32_t nnsc_model_classes(const nnsc_model* model);
NNSC_API uint32_t nnsc_model_dim(const nnsc_model* model);
/* Name of class c; valid while the handle lives. */
NNSC_API const char* nnsc_model_class_name(const nnsc_model* model, uint32_t c);

/* ------------------------------------------------------------------ */
/* Experiments                                                        */
/* ------------------------------------------------------------------ */

typedef struct nnsc_experiment_options {
  int mode;               /* nnsc_coding_mode */
  double lambda;
  double beta;
  double reg_c;
  uint32_t codebook_size;
  int codebook_method;    /* nnsc_codebook_method */
  uint32_t patch;
  uint32_t step;
  uint32_t train_per_class;
  uint32_t splits;
  uint64_t seed;
  uint64_t sample_limit;
  uint32_t kmeans_max_iter;
  uint32_t sc_outer_iters;
  uint32_t svm_epochs;
  double inner_tol;
  uint32_t inner_max_iter;
  uint32_t outer_max_iter;
  int fixed_codebook;     /* train one codebook on the first split, reuse */
  uint32_t workers;       /* 0 = hardware concurrency */
} nnsc_experiment_options;

NNSC_API void nnsc_experiment_options_init(nnsc_experiment_options* opts);

/* Runs seeded train/test splits over a dataset directory (one subdirectory
 * per class holding .nnsc descriptor files or PGM/PPM images). report
 * receives the deterministic text report (table + key=value lines); timing,
 * when non-NULL, receives run-dependent stage timings. Free both with
 * nnsc_string_free. */
NNSC_API nnsc_status nnsc_experiment_run(const char* dataset_dir,
                                         const nnsc_experiment_options* opts, char** report,
                                         char** timing);

/* Writes the bundled synthetic descriptor dataset (class-exclusive atom
 * sets; linearly separable by construction). */
NNSC_API nnsc_status nnsc_synthetic_dataset_write(const char* dataset_dir, uint32_t classes,
                                                  uint32_t images_per_class,
                                                  uint32_t descriptors_per_image, uint32_t dim,
                                                  uint32_t atoms_per_class, uint64_t seed);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* NNSC_H */
