#ifndef CSECOC_CSECOC_H
#define CSECOC_CSECOC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(CSECOC_BUILDING_LIBRARY)
#define CSECOC_API __declspec(dllexport)
#else
#define CSECOC_API __declspec(dllimport)
#endif
#else
#define CSECOC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum csecoc_status {
  CSECOC_OK = 0,
  CSECOC_ERR_INVALID_ARGUMENT = 1,
  CSECOC_ERR_IO = 2,
  CSECOC_ERR_PARSE = 3,
  CSECOC_ERR_DATA = 4,
  CSECOC_ERR_NUMERIC = 5,
  CSECOC_ERR_INTERNAL = 6
} csecoc_status;

typedef struct csecoc_dataset csecoc_dataset;
typedef struct csecoc_matrix csecoc_matrix;
typedef struct csecoc_model csecoc_model;
typedef struct csecoc_report csecoc_report;

/* Message of the last failed call on this thread; "" after a success. */
CSECOC_API const char* csecoc_last_error(void);
CSECOC_API const char* csecoc_version(void);

/* Datasets. A registered name is looked up in <data_dir>/datasets.json;
   anything else is read as a CSV path with the label in the last column. */
CSECOC_API csecoc_status csecoc_dataset_load(const char* data_dir, const char* name_or_path,
                                             csecoc_dataset** out);
CSECOC_API void csecoc_dataset_free(csecoc_dataset* ds);
CSECOC_API size_t csecoc_dataset_rows(const csecoc_dataset* ds);
CSECOC_API size_t csecoc_dataset_features(const csecoc_dataset* ds);
CSECOC_API int csecoc_dataset_classes(const csecoc_dataset* ds);
CSECOC_API const char* csecoc_dataset_class_name(const csecoc_dataset* ds, int c);
CSECOC_API int csecoc_dataset_label(const csecoc_dataset* ds, size_t row);
CSECOC_API const double* csecoc_dataset_row(const csecoc_dataset* ds, size_t row);

typedef struct csecoc_matrix_options {
  double eps;
  int standardize;
  uint64_t seed;
  int random_candidates;
  /* Regression targets for soft codes: "coverage" (NULL) or "sign". */
  const char* targets;
} csecoc_matrix_options;

CSECOC_API void csecoc_matrix_options_init(csecoc_matrix_options* opts);

/* method: csecoc, decoc, ova, ovo, dense_random, sparse_random. */
CSECOC_API csecoc_status csecoc_matrix_build(const csecoc_dataset* ds, const char* method,
                                             const csecoc_matrix_options* opts, csecoc_matrix** out);
/* kind may be NULL to infer it from the entries. */
CSECOC_API csecoc_status csecoc_matrix_read(const char* path, const char* kind, csecoc_matrix** out);
CSECOC_API csecoc_status csecoc_matrix_write(const csecoc_matrix* m, const char* path);
/* Sidecar CSV of each column's class partition, criterion value and parent. */
CSECOC_API csecoc_status csecoc_matrix_write_notes(const csecoc_matrix* m, const char* path);
CSECOC_API void csecoc_matrix_free(csecoc_matrix* m);
CSECOC_API int csecoc_matrix_rows(const csecoc_matrix* m);
CSECOC_API int csecoc_matrix_cols(const csecoc_matrix* m);
CSECOC_API double csecoc_matrix_value(const csecoc_matrix* m, int row, int col);
CSECOC_API const char* csecoc_matrix_kind(const csecoc_matrix* m);
CSECOC_API csecoc_status csecoc_matrix_validate(const csecoc_matrix* m, csecoc_report** out);

typedef struct csecoc_learner_options {
  /* knn (regressor for csecoc, classifier otherwise), kernel, knn_regressor,
     knn_classifier or kernel_ridge. */
  const char* learner;
  int knn_k;
  /* <= 0 selects 1 / feature count. */
  double gamma;
  double ridge_lambda;
  /* NULL picks hamming_ternary for classifiers, euclidean otherwise. */
  const char* decoding;
} csecoc_learner_options;

CSECOC_API void csecoc_learner_options_init(csecoc_learner_options* opts);

/* Trains on the whole dataset. fixed may be NULL; otherwise its matrix is
   used instead of building one. */
CSECOC_API csecoc_status csecoc_model_train(const csecoc_dataset* ds, const char* method,
                                            const csecoc_learner_options* learner,
                                            const csecoc_matrix_options* matrix, const csecoc_matrix* fixed,
                                            csecoc_model** out);
CSECOC_API void csecoc_model_free(csecoc_model* model);
CSECOC_API size_t csecoc_model_features(const csecoc_model* model);
CSECOC_API int csecoc_model_classes(const csecoc_model* model);
CSECOC_API const char* csecoc_model_class_name(const csecoc_model* model, int c);
CSECOC_API csecoc_status csecoc_model_predict(const csecoc_model* model, const double* x, size_t n, int* out_class);
/* Learner outputs for one sample; out must hold csecoc_matrix_cols() values. */
CSECOC_API csecoc_status csecoc_model_outputs(const csecoc_model* model, const double* x, size_t n, double* out);
/* Borrowed; valid while the model lives. */
CSECOC_API const csecoc_matrix* csecoc_model_matrix(const csecoc_model* model);
/* JSON manifest: dataset source and fingerprint, matrix, learner and
   pipeline settings. */
CSECOC_API csecoc_status csecoc_model_write_manifest(const csecoc_model* model, const char* path);
/* Reloads the recorded dataset, checks its fingerprint and retrains with the
   recorded matrix. */
CSECOC_API csecoc_status csecoc_model_load_manifest(const char* path, csecoc_model** out);

typedef void (*csecoc_log_fn)(const char* line, void* user);

typedef struct csecoc_benchmark_options {
  const char* data_dir;
  /* Comma-separated names or paths, or "all" for every registered dataset. */
  const char* datasets;
  /* Comma-separated methods, or "all". */
  const char* methods;
  csecoc_learner_options learner;
  int folds;
  int repeats;
  uint64_t seed;
  double eps;
  int standardize;
  int leaky_matrix;
  int workers;
  int random_candidates;
  const char* targets;
  /* JSON object echoed into the report metadata; may be NULL. */
  const char* run_config_json;
  csecoc_log_fn log;
  void* log_user;
} csecoc_benchmark_options;

CSECOC_API void csecoc_benchmark_options_init(csecoc_benchmark_options* opts);

/* Writes the JSON and text reports (either path may be NULL). Failed cells
   are listed in the report and do not fail the call. */
CSECOC_API csecoc_status csecoc_benchmark_run(const csecoc_benchmark_options* opts, const char* json_path,
                                              const char* text_path, csecoc_report** out);

/* Brute-force oracle comparisons on ds. matrix may be NULL; when given it is
   validated as well. */
CSECOC_API csecoc_status csecoc_oracle_check(const csecoc_dataset* ds, double eps, uint64_t seed,
                                             const csecoc_matrix* matrix, csecoc_report** out);

CSECOC_API void csecoc_report_free(csecoc_report* report);
CSECOC_API int csecoc_report_ok(const csecoc_report* report);
CSECOC_API const char* csecoc_report_text(const csecoc_report* report);
CSECOC_API const char* csecoc_report_json(const csecoc_report* report);
CSECOC_API size_t csecoc_report_failure_count(const csecoc_report* report);

#ifdef __cplusplus
}
#endif

#endif
