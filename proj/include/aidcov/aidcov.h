// Copyright 2026 The aidcov Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* aidcov: image-set covariance descriptors built from a Nystrom embedding of
 * per-image covariances under a log-Euclidean kernel.
 *
 * Every function returns an aidcov_status. On failure the message of the most
 * recent error on the calling thread is available from aidcov_last_error().
 * Objects are opaque handles released with the matching *_free function;
 * passing NULL to a *_free function is a no-op. Matrices are dense,
 * column-major arrays of doubles.
 */
#ifndef AIDCOV_AIDCOV_H_
#define AIDCOV_AIDCOV_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define AIDCOV_API __declspec(dllexport)
#else
#define AIDCOV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aidcov_status {
  AIDCOV_OK = 0,
  AIDCOV_ERR_INVALID_ARGUMENT = 1,
  AIDCOV_ERR_DIMENSION = 2,
  AIDCOV_ERR_NUMERICAL = 3,
  AIDCOV_ERR_CONVERGENCE = 4,
  AIDCOV_ERR_IO = 5,
  AIDCOV_ERR_CONFIG = 6,
  AIDCOV_ERR_LEAKAGE = 7,
  AIDCOV_ERR_INTERNAL = 8
} aidcov_status;

typedef enum aidcov_report_format {
  AIDCOV_REPORT_JSON = 0,
  AIDCOV_REPORT_CSV = 1,
  AIDCOV_REPORT_TEXT = 2
} aidcov_report_format;

typedef struct aidcov_spd aidcov_spd;
typedef struct aidcov_nystrom aidcov_nystrom;
typedef struct aidcov_config aidcov_config;
typedef struct aidcov_dataset aidcov_dataset;
typedef struct aidcov_report aidcov_report;
typedef struct aidcov_selftest aidcov_selftest;

typedef void (*aidcov_log_fn)(const char* message, void* user);

AIDCOV_API const char* aidcov_version(void);
AIDCOV_API const char* aidcov_last_error(void);
AIDCOV_API const char* aidcov_status_name(aidcov_status status);
/* Frees strings returned through char** out-parameters. */
AIDCOV_API void aidcov_string_free(char* s);

/* SPD matrices. */
/* Validates a symmetric positive definite n x n matrix as given. */
AIDCOV_API aidcov_status aidcov_spd_create(const double* data, size_t n, aidcov_spd** out);
/* (A + A^T)/2 plus a trace-scaled ridge eps * tr/n. */
AIDCOV_API aidcov_status aidcov_spd_regularize(const double* data, size_t n, double eps,
                                               aidcov_spd** out);
/* Matrix exponential of a symmetric n x n matrix. */
AIDCOV_API aidcov_status aidcov_spd_exp(const double* sym, size_t n, aidcov_spd** out);
AIDCOV_API void aidcov_spd_free(aidcov_spd* m);
AIDCOV_API size_t aidcov_spd_dim(const aidcov_spd* m);
/* Copies the n*n entries into out. */
AIDCOV_API aidcov_status aidcov_spd_data(const aidcov_spd* m, double* out);
AIDCOV_API aidcov_status aidcov_spd_log(const aidcov_spd* m, double* out);
/* Eigenvalues in descending order (n entries). */
AIDCOV_API aidcov_status aidcov_spd_eigenvalues(const aidcov_spd* m, double* out);

AIDCOV_API aidcov_status aidcov_airm_distance(const aidcov_spd* a, const aidcov_spd* b,
                                              double* out);
AIDCOV_API aidcov_status aidcov_lem_distance(const aidcov_spd* a, const aidcov_spd* b,
                                             double* out);
/* kernel_json: e.g. {"kind":"LOGE_POLY","degree":2,"coeffs":[1,1]}; NULL = linear. */
AIDCOV_API aidcov_status aidcov_kernel(const char* kernel_json, const aidcov_spd* a,
                                       const aidcov_spd* b, double* out);
/* m x m Gram matrix over `set`. */
AIDCOV_API aidcov_status aidcov_gram(const char* kernel_json, const aidcov_spd* const* set,
                                     size_t m, double* out);

/* Nystrom embedding. */
AIDCOV_API aidcov_status aidcov_nystrom_fit(const char* kernel_json,
                                            const aidcov_spd* const* landmarks, size_t m,
                                            int target_dim, aidcov_nystrom** out);
AIDCOV_API void aidcov_nystrom_free(aidcov_nystrom* model);
/* Effective embedding dimension (may be below the requested one). */
AIDCOV_API size_t aidcov_nystrom_dim(const aidcov_nystrom* model);
AIDCOV_API size_t aidcov_nystrom_landmarks(const aidcov_nystrom* model);
/* Writes dim() entries. */
AIDCOV_API aidcov_status aidcov_nystrom_embed(const aidcov_nystrom* model, const aidcov_spd* y,
                                              double* out);
/* Covariance of the embeddings of `set`, regularized with eps (dim x dim). */
AIDCOV_API aidcov_status aidcov_aid_covd(const aidcov_nystrom* model,
                                         const aidcov_spd* const* set, size_t n, double eps,
                                         aidcov_spd** out);
AIDCOV_API aidcov_status aidcov_nystrom_save(const aidcov_nystrom* model, const char* path);
AIDCOV_API aidcov_status aidcov_nystrom_load(const char* path, aidcov_nystrom** out);

/* Configuration. */
AIDCOV_API aidcov_status aidcov_config_default(aidcov_config** out);
AIDCOV_API aidcov_status aidcov_config_load(const char* path, aidcov_config** out);
AIDCOV_API void aidcov_config_free(aidcov_config* config);
/* Dotted key ("protocol.trials"); the value is parsed as JSON, else taken as a string. */
AIDCOV_API aidcov_status aidcov_config_set(aidcov_config* config, const char* key,
                                           const char* value);
/* Value at a dotted key: the raw text for strings, JSON text otherwise. */
AIDCOV_API aidcov_status aidcov_config_get(const aidcov_config* config, const char* key,
                                           char** out);
AIDCOV_API aidcov_status aidcov_config_validate(const aidcov_config* config);
/* 16 hex digits plus terminator. */
AIDCOV_API aidcov_status aidcov_config_hash(const aidcov_config* config, char out[17]);
AIDCOV_API aidcov_status aidcov_config_to_json(const aidcov_config* config, char** out);
AIDCOV_API aidcov_status aidcov_config_save(const aidcov_config* config, const char* path);

/* Datasets: root/<class>/<set>/<image>.{pgm,png}. */
AIDCOV_API aidcov_status aidcov_dataset_load(const char* root, aidcov_dataset** out);
/* Synthetic dataset from the config's synth section. */
AIDCOV_API aidcov_status aidcov_dataset_synth(const aidcov_config* config, aidcov_dataset** out);
AIDCOV_API aidcov_status aidcov_dataset_write(const aidcov_dataset* dataset, const char* root);
AIDCOV_API void aidcov_dataset_free(aidcov_dataset* dataset);
AIDCOV_API size_t aidcov_dataset_sets(const aidcov_dataset* dataset);
AIDCOV_API size_t aidcov_dataset_images(const aidcov_dataset* dataset);

/* Populates the descriptor cache (per-image and traditional set descriptors). */
AIDCOV_API aidcov_status aidcov_extract(const aidcov_config* config,
                                        const aidcov_dataset* dataset, const char* cache_dir,
                                        size_t* computed, size_t* cache_hits);

/* Runs the evaluation protocol. cache_dir may be NULL; log may be NULL. */
AIDCOV_API aidcov_status aidcov_eval(const aidcov_config* config, const aidcov_dataset* dataset,
                                     const char* cache_dir, aidcov_log_fn log, void* user,
                                     aidcov_report** out);
AIDCOV_API void aidcov_report_free(aidcov_report* report);
AIDCOV_API aidcov_status aidcov_report_write(const aidcov_report* report,
                                             aidcov_report_format format, const char* path);
AIDCOV_API aidcov_status aidcov_report_format_string(const aidcov_report* report,
                                                     aidcov_report_format format, char** out);
/* Per-method wall-clock seconds as JSON (kept out of the report for determinism). */
AIDCOV_API aidcov_status aidcov_report_write_timings(const aidcov_report* report,
                                                     const char* path);
AIDCOV_API size_t aidcov_report_methods(const aidcov_report* report);
/* name stays valid for the lifetime of the report; mean and std are percent. */
AIDCOV_API aidcov_status aidcov_report_method(const aidcov_report* report, size_t i,
                                              const char** name, double* mean, double* std);
AIDCOV_API size_t aidcov_report_warnings(const aidcov_report* report);
AIDCOV_API const char* aidcov_report_warning(const aidcov_report* report, size_t i);

/* Embedded invariant suite. */
AIDCOV_API aidcov_status aidcov_selftest_run(uint64_t seed, aidcov_selftest** out);
AIDCOV_API void aidcov_selftest_free(aidcov_selftest* result);
AIDCOV_API size_t aidcov_selftest_count(const aidcov_selftest* result);
AIDCOV_API aidcov_status aidcov_selftest_item(const aidcov_selftest* result, size_t i,
                                              const char** name, int* passed,
                                              const char** detail);

#ifdef __cplusplus
}
#endif

#endif /* AIDCOV_AIDCOV_H_ */
