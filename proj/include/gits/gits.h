/* Copyright 2026 The Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the temporal start-index selection library.
 *
 * All objects are opaque handles released with the matching *_free call.
 * Every fallible call returns a gits_status; on failure the message is
 * available from gits_last_error() on the same thread until the next call.
 * Strings returned through char** are released with gits_string_free.
 */

#ifndef GITS_GITS_H_
#define GITS_GITS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(GITS_BUILDING_LIBRARY)
#define GITS_API __attribute__((visibility("default")))
#else
#define GITS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gits_status {
  GITS_OK = 0,
  GITS_E_INVALID_ARGUMENT = 1,
  GITS_E_CONFIG = 2,
  GITS_E_IO = 3,
  GITS_E_FORMAT = 4,
  GITS_E_SHAPE = 5,
  GITS_E_GENERATION = 6,
  GITS_E_DIVERGENCE = 7,
  GITS_E_METRIC = 8,
  GITS_E_CELL_FAILURES = 9,
  GITS_E_INTERNAL = 99
} gits_status;

typedef struct gits_config gits_config;
typedef struct gits_dataset gits_dataset;
typedef struct gits_selection gits_selection;
typedef struct gits_model gits_model;

typedef struct gits_report {
  double nrmse;
  double crmse;
  double brmse;
  double frmse_low;
  double frmse_mid;
  double frmse_high;
  int horizon;
  int n_test;
} gits_report;

GITS_API const char* gits_version(void);
GITS_API const char* gits_last_error(void);
GITS_API const char* gits_status_string(gits_status status);
GITS_API void gits_string_free(char* s);

/* Configuration. Keys are "section.name", e.g. "train.epochs_max". */
GITS_API gits_status gits_config_default(gits_config** out);
GITS_API gits_status gits_config_load(const char* path, gits_config** out);
GITS_API gits_status gits_config_parse(const char* text, gits_config** out);
GITS_API gits_status gits_config_set(gits_config* cfg, const char* key,
                                     const char* value);
GITS_API gits_status gits_config_dump(const gits_config* cfg, char** out_text);
GITS_API void gits_config_free(gits_config* cfg);

/* Datasets are stored as <stem>.json (manifest) beside <stem>.f32. */
GITS_API gits_status gits_dataset_generate(const gits_config* cfg,
                                           gits_dataset** out);
GITS_API gits_status gits_dataset_read(const char* stem, gits_dataset** out);
GITS_API gits_status gits_dataset_write(const gits_dataset* ds,
                                        const char* stem);
GITS_API gits_status gits_dataset_dims(const gits_dataset* ds, int* n_traj,
                                       int* t_count, int* spatial_size,
                                       int* channels);
GITS_API void gits_dataset_free(gits_dataset* ds);

/* Selects K = max(1, round(ratio * |C|)) start indices with the named
 * sampler (gits, uniform, loss_only, coverage_only, grad_only, loss_div,
 * grad_match). seed drives the pilot for pilot-based samplers. */
GITS_API gits_status gits_select(const gits_config* cfg,
                                 const gits_dataset* ds, const char* sampler,
                                 double ratio, uint64_t seed,
                                 gits_selection** out);
/* Copies up to capacity indices in greedy order; *count gets the total. */
GITS_API gits_status gits_selection_indices(const gits_selection* sel,
                                            int* out, size_t capacity,
                                            size_t* count);
GITS_API gits_status gits_selection_objective(const gits_selection* sel,
                                              double* out);
GITS_API gits_status gits_selection_write(const gits_selection* sel,
                                          const char* path);
GITS_API gits_status gits_selection_read(const char* path,
                                         gits_selection** out);
GITS_API void gits_selection_free(gits_selection* sel);

/* Trains the downstream surrogate on D(selected starts). */
GITS_API gits_status gits_train(const gits_config* cfg, const gits_dataset* ds,
                                const gits_selection* sel, uint64_t seed,
                                gits_model** out);
GITS_API gits_status gits_model_param_count(const gits_model* model,
                                            size_t* out);
GITS_API gits_status gits_model_write(const gits_model* model,
                                      const char* stem);
GITS_API gits_status gits_model_read(const char* stem, gits_model** out);
GITS_API void gits_model_free(gits_model* model);

/* Full rollout report on the test split. */
GITS_API gits_status gits_evaluate(const gits_config* cfg,
                                   const gits_dataset* ds,
                                   const gits_model* model, gits_report* out);

/* Runs the (ratio, sampler, seed) grid and writes results.csv,
 * summary.json and summary.txt to output_dir (cfg's when NULL). Returns
 * GITS_E_CELL_FAILURES when any cell failed; *failures gets the count.
 * Progress lines go to stderr when verbose is nonzero. */
GITS_API gits_status gits_run_experiment(const gits_config* cfg,
                                         const char* output_dir, int verbose,
                                         int* failures);

/* suites: comma-separated names, "" for none, NULL for all. */
GITS_API gits_status gits_selftest(const char* suites, uint64_t seed,
                                   int* passed, char** report_text);

#ifdef __cplusplus
}
#endif

#endif /* GITS_GITS_H_ */
