/* Copyright 2026 The hrtfkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the hrtfkit core: HRTF datasets, sparse subsets,
 * interpolation baselines, frequency-domain upsampling models, training,
 * and metric reports.
 *
 * Conventions:
 *  - Every fallible call returns hrtf_status; on failure the thread-local
 *    message from hrtf_last_error() describes the cause.
 *  - Out-parameters are written only on HRTF_OK.
 *  - Objects are created behind opaque handles and released with the
 *    matching *_free; handles are never shared across threads without
 *    external synchronization.
 *  - Strings returned through char** out-parameters are heap copies owned
 *    by the caller; release them with hrtf_string_free.
 *  - Log-magnitude tensors are row-major direction x ear x frequency with
 *    ear 0 = left.
 */

#ifndef HRTFKIT_INCLUDE_HRTF_HRTF_H_
#define HRTFKIT_INCLUDE_HRTF_HRTF_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hrtf_status {
  HRTF_OK = 0,
  HRTF_ERR_INVALID_ARGUMENT = 1, /* bad parameter or config schema violation */
  HRTF_ERR_IO = 2,               /* filesystem failure */
  HRTF_ERR_FORMAT = 3,           /* malformed container, checkpoint, or CSV */
  HRTF_ERR_NUMERIC = 4,          /* NaN/Inf, singular system */
  HRTF_ERR_INTERNAL = 5
} hrtf_status;

typedef struct hrtf_dataset hrtf_dataset; /* ordered list of subjects */
typedef struct hrtf_sparse hrtf_sparse;   /* measured-direction subset */
typedef struct hrtf_model hrtf_model;     /* weights plus model config */
typedef struct hrtf_eval hrtf_eval;       /* per-subject metric reports */

const char* hrtf_version(void);

/* Message for the most recent failure on this thread; empty string when
 * no call has failed yet. The pointer stays valid until the next failing
 * call on the same thread. */
const char* hrtf_last_error(void);

void hrtf_string_free(char* s);

/* Caps worker threads for subsequent calls and returns the effective
 * count. The core currently runs single-threaded, so the result is 1. */
int hrtf_set_threads(int n);

/* ------------------------------------------------------------------ */
/* Datasets                                                            */
/* ------------------------------------------------------------------ */

/* Deterministic synthetic corpus: smooth band-limited directional fields
 * plus elevation-shifting notches, one subject per seed stream. */
hrtf_status hrtf_dataset_synth(uint64_t seed, int subjects, int num_directions,
                               int num_freqs, int sh_order, int notch_count,
                               hrtf_dataset** out);

/* Loads one container file, or every *.hrtfset file in a directory in
 * lexicographic order. */
hrtf_status hrtf_dataset_load(const char* path, hrtf_dataset** out);

/* Writes "<subject_id>.hrtfset" per subject into dir (created if needed). */
hrtf_status hrtf_dataset_save(const hrtf_dataset* ds, const char* dir);

/* Subjects [begin, begin + count) as a new dataset. */
hrtf_status hrtf_dataset_slice(const hrtf_dataset* ds, int begin, int count,
                               hrtf_dataset** out);

/* Single-subject dataset that reuses subject's directions and frequency
 * grid but carries the given D*2*F values; used to persist predictions. */
hrtf_status hrtf_dataset_with_values(const hrtf_dataset* ds, int subject,
                                     const double* values, size_t n,
                                     hrtf_dataset** out);

void hrtf_dataset_free(hrtf_dataset* ds);

/* Counts return -1 on a null handle (or an empty dataset's geometry). */
int hrtf_dataset_size(const hrtf_dataset* ds);
int hrtf_dataset_num_directions(const hrtf_dataset* ds);
int hrtf_dataset_num_freqs(const hrtf_dataset* ds);

hrtf_status hrtf_dataset_subject_id(const hrtf_dataset* ds, int subject,
                                    char** out);

/* Copies subject's D*2*F log-magnitudes; cap must be at least D*2*F. */
hrtf_status hrtf_dataset_values(const hrtf_dataset* ds, int subject, float* out,
                                size_t cap);

/* ------------------------------------------------------------------ */
/* Sparse subsets                                                      */
/* ------------------------------------------------------------------ */

/* Greedy farthest-point selection over the first subject's directions. */
hrtf_status hrtf_sparse_farthest(const hrtf_dataset* ds, int num_measured,
                                 hrtf_sparse** out);

hrtf_status hrtf_sparse_explicit(const int* indices, int num_measured,
                                 int num_directions, hrtf_sparse** out);

void hrtf_sparse_free(hrtf_sparse* sp);
int hrtf_sparse_num_measured(const hrtf_sparse* sp);
int hrtf_sparse_num_directions(const hrtf_sparse* sp);

/* Copies the sorted measured indices; cap must be at least num_measured. */
hrtf_status hrtf_sparse_indices(const hrtf_sparse* sp, int* out, size_t cap);

/* ------------------------------------------------------------------ */
/* Models and training                                                 */
/* ------------------------------------------------------------------ */

/* config_text uses the "key = value" model-config schema (see README);
 * seed drives the parameter initialization. */
hrtf_status hrtf_model_create(const char* config_text, uint64_t seed,
                              hrtf_model** out);

/* FDCKPT01 checkpoint round-trip. Loading rebuilds the model from the
 * embedded config; saving preserves optimizer state bit-exactly. */
hrtf_status hrtf_model_load(const char* path, hrtf_model** out);
hrtf_status hrtf_model_save(const hrtf_model* model, const char* path);

void hrtf_model_free(hrtf_model* model);
hrtf_status hrtf_model_config_text(const hrtf_model* model, char** out);
size_t hrtf_model_parameter_count(const hrtf_model* model); /* 0 on null */

/* Dense upsampling of one subject from its measured rows. out receives
 * D*2*F values; cap must cover that. */
hrtf_status hrtf_model_predict(const hrtf_model* model, const hrtf_dataset* ds,
                               int subject, const hrtf_sparse* sp, double* out,
                               size_t cap);

typedef struct hrtf_train_options {
  double learning_rate; /* 1e-3 */
  int batch_size;       /* 32 */
  int max_epochs;       /* 800 */
  double beta;          /* spectral-gradient loss weight, 1.0 */
  uint64_t seed;
  double grad_clip;            /* global norm, <= 0 disables, 5.0 */
  const char* checkpoint_path; /* NULL: keep the best checkpoint in memory only */
} hrtf_train_options;

void hrtf_train_options_default(hrtf_train_options* out);

typedef void (*hrtf_epoch_fn)(void* user, int epoch, double train_loss,
                              double val_lsd, double wall_seconds);

/* Supervised run over disjoint train/validation subject sets. On success
 * returns the best-validation model and, when out_history_csv is non-null,
 * the epoch,train_loss,val_lsd,wall_seconds history. on_epoch may be NULL. */
hrtf_status hrtf_train(const hrtf_dataset* train_set, const hrtf_dataset* val_set,
                       const hrtf_sparse* sp, const char* model_config_text,
                       const hrtf_train_options* options, hrtf_epoch_fn on_epoch,
                       void* user, hrtf_model** out_model,
                       char** out_history_csv);

/* ------------------------------------------------------------------ */
/* Baselines, evaluation, reports                                      */
/* ------------------------------------------------------------------ */

/* method is one of "nearest", "distw", "barycentric", "sh". l_max < 0
 * selects floor(sqrt(M)) - 1 and lambda < 0 selects 1e-3 (sh only). */
hrtf_status hrtf_baseline_dense(const hrtf_dataset* ds, int subject,
                                const hrtf_sparse* sp, const char* method,
                                int l_max, double lambda, double* out,
                                size_t cap);

hrtf_status hrtf_eval_baseline(const hrtf_dataset* ds, const hrtf_sparse* sp,
                               const char* method, int l_max, double lambda,
                               hrtf_eval** out);

hrtf_status hrtf_eval_model(const hrtf_model* model, const hrtf_dataset* ds,
                            const hrtf_sparse* sp, hrtf_eval** out);

void hrtf_eval_free(hrtf_eval* ev);

/* Aggregate metrics over subjects; NaN on a null handle. */
double hrtf_eval_mean_lsd(const hrtf_eval* ev);
double hrtf_eval_mean_ild(const hrtf_eval* ev);

hrtf_status hrtf_eval_csv(const hrtf_eval* ev, char** out);
hrtf_status hrtf_eval_per_frequency_csv(const hrtf_eval* ev, char** out);
hrtf_status hrtf_eval_markdown(const hrtf_eval* ev, char** out);

/* Merges metric CSV documents (as produced by hrtf_eval_csv) into one
 * combined CSV and one Markdown table. */
hrtf_status hrtf_report_merge(const char* const* csv_texts, int n,
                              char** out_csv, char** out_markdown);

/* ------------------------------------------------------------------ */
/* Analysis                                                            */
/* ------------------------------------------------------------------ */

/* Frequency-frequency Pearson correlation over every (subject, direction,
 * ear) sample in the dataset, rendered as CSV. */
hrtf_status hrtf_correlation_csv(const hrtf_dataset* ds, char** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HRTFKIT_INCLUDE_HRTF_HRTF_H_ */
