/*
 * Copyright 2026 The kbcq Authors
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

/*
 * kbcq C API: knowledge-base completion as query answering.
 *
 * All handles are opaque and owned by the caller; release them with the
 * matching *_free function (NULL is accepted). Every fallible call returns a
 * kbcq_status; on failure a human-readable message is available from
 * kbcq_last_error() on the same thread until the next failing call.
 * Strings returned by accessors are owned by the handle and stay valid until
 * the handle is freed.
 */

#ifndef KBCQ_KBCQ_H_
#define KBCQ_KBCQ_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define KBCQ_API __declspec(dllexport)
#else
#define KBCQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kbcq_status {
  KBCQ_OK = 0,
  KBCQ_ERR_INVALID_ARGUMENT = 1,
  KBCQ_ERR_IO = 2,
  KBCQ_ERR_PARSE = 3,
  KBCQ_ERR_PARAMETER = 4,
  KBCQ_ERR_NUMERICAL = 5,
  KBCQ_ERR_MISMATCH = 6,
  KBCQ_ERR_INTERNAL = 7
} kbcq_status;

typedef enum kbcq_model_kind {
  KBCQ_MODEL_TRANSE = 0,
  KBCQ_MODEL_DISTMULT = 1,
  KBCQ_MODEL_COMPLEX = 2,
  KBCQ_MODEL_REGION = 3
} kbcq_model_kind;

typedef enum kbcq_label { KBCQ_LABEL_C = 0, KBCQ_LABEL_I = 1, KBCQ_LABEL_N = 2, KBCQ_LABEL_F = 3 } kbcq_label;

typedef enum kbcq_split { KBCQ_SPLIT_DEV = 0, KBCQ_SPLIT_TEST = 1, KBCQ_SPLIT_TOTAL = 2 } kbcq_split;

typedef enum kbcq_subset {
  KBCQ_SUBSET_FULL = 0,
  KBCQ_SUBSET_C = 1,
  KBCQ_SUBSET_CF = 2,
  KBCQ_SUBSET_I = 3
} kbcq_subset;

enum { KBCQ_THRESHOLD_GLOBAL = 1, KBCQ_THRESHOLD_PER_RELATION = 2 };

typedef struct kbcq_kb kbcq_kb;
typedef struct kbcq_dataset kbcq_dataset;
typedef struct kbcq_model kbcq_model;
typedef struct kbcq_report kbcq_report;

KBCQ_API const char* kbcq_version(void);
KBCQ_API const char* kbcq_status_name(kbcq_status status);
/* Message of the last failing call on this thread, "" if none. */
KBCQ_API const char* kbcq_last_error(void);

/* ---- knowledge base ---- */

KBCQ_API kbcq_status kbcq_kb_load(const char* train_path, const char* valid_path,
                                  const char* test_path, kbcq_kb** out);
/* Attaches entity types ("entity<TAB>type" lines) and relation signatures
 * ("relation<TAB>domain<TAB>range" lines). */
KBCQ_API kbcq_status kbcq_kb_load_types(kbcq_kb* kb, const char* entity_types_path,
                                        const char* relation_signatures_path);
KBCQ_API size_t kbcq_kb_num_entities(const kbcq_kb* kb);
KBCQ_API size_t kbcq_kb_num_relations(const kbcq_kb* kb);
KBCQ_API size_t kbcq_kb_warning_count(const kbcq_kb* kb);
KBCQ_API const char* kbcq_kb_warning(const kbcq_kb* kb, size_t index);
KBCQ_API void kbcq_kb_free(kbcq_kb* kb);

/* ---- dataset ---- */

typedef struct kbcq_build_options {
  size_t remove_n;
  uint64_t removal_seed;
  uint64_t fake_seed;
  uint64_t split_seed;
  /* Target pool composition; normalized to sum to one. */
  double empty_fraction;
  double answered_fraction;
  double fake_fraction;
} kbcq_build_options;

typedef struct kbcq_label_counts {
  /* Indexed by kbcq_label. */
  size_t tail[4];
  size_t head[4];
} kbcq_label_counts;

KBCQ_API void kbcq_build_options_default(kbcq_build_options* options);
KBCQ_API kbcq_status kbcq_dataset_build(const kbcq_kb* kb, const kbcq_build_options* options,
                                        kbcq_dataset** out);
KBCQ_API kbcq_status kbcq_dataset_write(const kbcq_dataset* ds, const char* dir);
KBCQ_API kbcq_status kbcq_dataset_read(const char* dir, kbcq_dataset** out);
KBCQ_API kbcq_status kbcq_dataset_counts(const kbcq_dataset* ds, kbcq_split split,
                                         kbcq_label_counts* out);
KBCQ_API size_t kbcq_dataset_num_retained(const kbcq_dataset* ds);
KBCQ_API size_t kbcq_dataset_num_removed(const kbcq_dataset* ds);
KBCQ_API size_t kbcq_dataset_num_relations(const kbcq_dataset* ds);
KBCQ_API size_t kbcq_dataset_num_train(const kbcq_dataset* ds);
KBCQ_API size_t kbcq_dataset_warning_count(const kbcq_dataset* ds);
KBCQ_API const char* kbcq_dataset_warning(const kbcq_dataset* ds, size_t index);
/* Lowercase hex SHA-256 of the serialized content files. */
KBCQ_API const char* kbcq_dataset_checksum(const kbcq_dataset* ds);
KBCQ_API void kbcq_dataset_free(kbcq_dataset* ds);

/* ---- models and training ---- */

typedef struct kbcq_train_config {
  kbcq_model_kind kind;
  size_t dim;
  size_t batch_size;
  double learning_rate;
  size_t max_epochs;
  size_t patience;
  int inverse_relations; /* 0 is allowed for TransE only */
  uint64_t seed;
  double adam_beta1;
  double adam_beta2;
  double adam_epsilon;
  unsigned threads;
} kbcq_train_config;

typedef void (*kbcq_epoch_callback)(size_t epoch, double train_loss, double dev_loss,
                                    int improved, void* user);

KBCQ_API const char* kbcq_model_kind_name(kbcq_model_kind kind);
KBCQ_API kbcq_status kbcq_model_kind_parse(const char* name, kbcq_model_kind* out);
KBCQ_API void kbcq_train_config_default(kbcq_train_config* config);
/* Validates the configuration without training. */
KBCQ_API kbcq_status kbcq_train_config_check(const kbcq_train_config* config);

/* Trains on the dataset's train split with dev-loss early stopping and
 * returns the best snapshot. A numerically diverged run still succeeds;
 * check kbcq_model_train_log_json. */
KBCQ_API kbcq_status kbcq_train(const kbcq_dataset* ds, const kbcq_train_config* config,
                                kbcq_epoch_callback callback, void* user, kbcq_model** out);
KBCQ_API kbcq_status kbcq_model_init(const kbcq_dataset* ds, kbcq_model_kind kind, size_t dim,
                                     uint64_t seed, int inverse_relations, kbcq_model** out);
KBCQ_API kbcq_status kbcq_model_save(kbcq_model* model, const char* path);
KBCQ_API kbcq_status kbcq_model_load(const char* path, kbcq_model** out);
KBCQ_API kbcq_model_kind kbcq_model_get_kind(const kbcq_model* model);
KBCQ_API size_t kbcq_model_dim(const kbcq_model* model);
/* Per-epoch losses and the stopping state; "{}" for models not trained in
 * this process. */
KBCQ_API const char* kbcq_model_train_log_json(const kbcq_model* model);
KBCQ_API int kbcq_model_diverged(const kbcq_model* model);
KBCQ_API void kbcq_model_free(kbcq_model* model);

/* ---- evaluation ---- */

typedef struct kbcq_eval_options {
  unsigned modes; /* KBCQ_THRESHOLD_* bitmask */
  kbcq_split split; /* DEV or TEST; thresholds are always tuned on dev */
  size_t tuning_iterations;
  unsigned threads;
} kbcq_eval_options;

KBCQ_API void kbcq_eval_options_default(kbcq_eval_options* options);
KBCQ_API kbcq_status kbcq_evaluate(const kbcq_model* model, const kbcq_dataset* ds,
                                   const kbcq_eval_options* options, kbcq_report** out);
KBCQ_API double kbcq_report_mrr(const kbcq_report* report);
/* mode is KBCQ_THRESHOLD_GLOBAL or KBCQ_THRESHOLD_PER_RELATION. Any output
 * pointer may be NULL. */
KBCQ_API kbcq_status kbcq_report_metrics(const kbcq_report* report, unsigned mode,
                                         kbcq_subset subset, double* precision, double* recall,
                                         double* f1);
KBCQ_API kbcq_status kbcq_report_dev_f1(const kbcq_report* report, unsigned mode, double* f1);
KBCQ_API const char* kbcq_report_json(const kbcq_report* report);
KBCQ_API const char* kbcq_report_tsv(const kbcq_report* report);
KBCQ_API void kbcq_report_free(kbcq_report* report);

#ifdef __cplusplus
}
#endif

#endif /* KBCQ_KBCQ_H_ */
