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

#include "kbcq/kbcq.h"

#include <cmath>
#include <json.hpp>
#include <new>
#include <string>

#include "kbcq/dataset.hpp"
#include "kbcq/evaluator.hpp"
#include "kbcq/kb.hpp"
#include "kbcq/model.hpp"
#include "kbcq/trainer.hpp"

struct kbcq_kb {
  kbcq::KnowledgeBase kb;
};

struct kbcq_dataset {
  kbcq::QueryDataset ds;
  mutable std::string checksum;
};

struct kbcq_model {
  kbcq::Checkpoint ck;
  std::string path;
  std::string log_json = "{}";
  bool diverged = false;
};

struct kbcq_report {
  kbcq::EvalReport report;
  std::string json;
  std::string tsv;
};

namespace {

thread_local std::string g_last_error;

kbcq_status fail(kbcq_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

// Runs fn, mapping exceptions to status codes.
template <typename F>
kbcq_status guarded(F&& fn) {
  try {
    fn();
    return KBCQ_OK;
  } catch (const kbcq::Error& e) {
    return fail(static_cast<kbcq_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(KBCQ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(KBCQ_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(KBCQ_ERR_INTERNAL, "unknown error");
  }
}

#define KBCQ_REQUIRE(cond, what)                                                  \
  do {                                                                            \
    if (!(cond)) return fail(KBCQ_ERR_INVALID_ARGUMENT, std::string(what));       \
  } while (0)

kbcq::TrainConfig to_config(const kbcq_train_config& c) {
  kbcq::TrainConfig t;
  t.kind = static_cast<kbcq::ModelKind>(c.kind);
  t.dim = c.dim;
  t.batch_size = c.batch_size;
  t.learning_rate = c.learning_rate;
  t.max_epochs = c.max_epochs;
  t.patience = c.patience;
  t.inverse_relations = c.inverse_relations != 0;
  t.seed = c.seed;
  t.adam_beta1 = c.adam_beta1;
  t.adam_beta2 = c.adam_beta2;
  t.adam_epsilon = c.adam_epsilon;
  t.threads = c.threads;
  return t;
}

bool valid_kind(int k) { return k >= KBCQ_MODEL_TRANSE && k <= KBCQ_MODEL_REGION; }

kbcq::SymbolTable retained_entities(const kbcq::QueryDataset& ds) {
  kbcq::SymbolTable out;
  const auto& names = ds.entities.names();
  for (std::size_t i = 0; i < ds.num_retained; ++i) out.intern(names[i]);
  return out;
}

std::string train_log_json(const kbcq::TrainLog& log, const kbcq::TrainConfig& c) {
  nlohmann::ordered_json j;
  j["model"] = std::string(kbcq::model_kind_name(c.kind));
  j["dim"] = c.dim;
  j["best_epoch"] = log.best_epoch;
  if (std::isfinite(log.best_dev_loss)) {
    j["best_dev_loss"] = log.best_dev_loss;
  } else {
    j["best_dev_loss"] = nullptr;
  }
  j["epochs_run"] = log.epochs.size();
  j["config"] = {{"batch_size", c.batch_size},
                 {"learning_rate", c.learning_rate},
                 {"max_epochs", c.max_epochs},
                 {"patience", c.patience},
                 {"inverse_relations", c.inverse_relations},
                 {"seed", c.seed},
                 {"adam_beta1", c.adam_beta1},
                 {"adam_beta2", c.adam_beta2},
                 {"adam_epsilon", c.adam_epsilon},
                 {"threads", c.threads}};
  j["off_grid"] = c.off_grid_notes();
  auto assumptions = nlohmann::ordered_json::array();
  if (c.kind == kbcq::ModelKind::Region) {
    assumptions.push_back("region entity rows are L2-normalized after every step, as for TransE");
  }
  assumptions.push_back("dev loss is the mean over unmasked (query, entity) cells");
  j["assumptions"] = std::move(assumptions);
  j["early_stopped"] = log.early_stopped;
  j["diverged"] = log.diverged;
  j["message"] = log.message;
  auto epochs = nlohmann::ordered_json::array();
  for (const auto& e : log.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"dev_loss", e.dev_loss},
                      {"improved", e.improved}});
  }
  j["epochs"] = std::move(epochs);
  return j.dump(2) + "\n";
}

const kbcq::ModeReport* find_mode(const kbcq::EvalReport& r, unsigned mode) {
  const auto want = mode == KBCQ_THRESHOLD_GLOBAL ? kbcq::ThresholdMode::Global
                                                  : kbcq::ThresholdMode::PerRelation;
  for (const auto& m : r.modes) {
    if (m.mode == want) return &m;
  }
  return nullptr;
}

}  // namespace

extern "C" {

const char* kbcq_version(void) { return "0.1.0"; }

const char* kbcq_status_name(kbcq_status status) {
  switch (status) {
    case KBCQ_OK: return "ok";
    case KBCQ_ERR_INVALID_ARGUMENT: return "invalid argument";
    case KBCQ_ERR_IO: return "i/o error";
    case KBCQ_ERR_PARSE: return "parse error";
    case KBCQ_ERR_PARAMETER: return "parameter error";
    case KBCQ_ERR_NUMERICAL: return "numerical error";
    case KBCQ_ERR_MISMATCH: return "mismatch";
    case KBCQ_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* kbcq_last_error(void) { return g_last_error.c_str(); }

// ---- knowledge base ----

kbcq_status kbcq_kb_load(const char* train_path, const char* valid_path, const char* test_path,
                         kbcq_kb** out) {
  KBCQ_REQUIRE(train_path && valid_path && test_path && out, "kbcq_kb_load: null argument");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<kbcq_kb>();
    h->kb = kbcq::load_knowledge_base(train_path, valid_path, test_path);
    *out = h.release();
  });
}

kbcq_status kbcq_kb_load_types(kbcq_kb* kb, const char* entity_types_path,
                               const char* relation_signatures_path) {
  KBCQ_REQUIRE(kb && entity_types_path && relation_signatures_path,
               "kbcq_kb_load_types: null argument");
  return guarded([&] {
    kb->kb.types = kbcq::load_type_system(entity_types_path, relation_signatures_path,
                                          kb->kb.entities, kb->kb.relations, &kb->kb.warnings);
  });
}

size_t kbcq_kb_num_entities(const kbcq_kb* kb) { return kb ? kb->kb.entities.size() : 0; }
size_t kbcq_kb_num_relations(const kbcq_kb* kb) { return kb ? kb->kb.relations.size() : 0; }
size_t kbcq_kb_warning_count(const kbcq_kb* kb) { return kb ? kb->kb.warnings.size() : 0; }
const char* kbcq_kb_warning(const kbcq_kb* kb, size_t index) {
  return kb && index < kb->kb.warnings.size() ? kb->kb.warnings[index].c_str() : nullptr;
}
void kbcq_kb_free(kbcq_kb* kb) { delete kb; }

// ---- dataset ----

void kbcq_build_options_default(kbcq_build_options* options) {
  if (!options) return;
  const kbcq::BuildOptions d;
  options->remove_n = d.remove_n;
  options->removal_seed = d.removal_seed;
  options->fake_seed = d.fake_seed;
  options->split_seed = d.split_seed;
  options->empty_fraction = d.targets.empty_removed;
  options->answered_fraction = d.targets.answered;
  options->fake_fraction = d.targets.fake;
}

kbcq_status kbcq_dataset_build(const kbcq_kb* kb, const kbcq_build_options* options,
                               kbcq_dataset** out) {
  KBCQ_REQUIRE(kb && options && out, "kbcq_dataset_build: null argument");
  *out = nullptr;
  return guarded([&] {
    kbcq::BuildOptions o;
    o.remove_n = options->remove_n;
    o.removal_seed = options->removal_seed;
    o.fake_seed = options->fake_seed;
    o.split_seed = options->split_seed;
    o.targets = {options->empty_fraction, options->answered_fraction, options->fake_fraction};
    auto h = std::make_unique<kbcq_dataset>();
    h->ds = kbcq::build_dataset(kb->kb, o);
    *out = h.release();
  });
}

kbcq_status kbcq_dataset_write(const kbcq_dataset* ds, const char* dir) {
  KBCQ_REQUIRE(ds && dir, "kbcq_dataset_write: null argument");
  return guarded([&] { kbcq::write_dataset(ds->ds, dir); });
}

kbcq_status kbcq_dataset_read(const char* dir, kbcq_dataset** out) {
  KBCQ_REQUIRE(dir && out, "kbcq_dataset_read: null argument");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<kbcq_dataset>();
    h->ds = kbcq::read_dataset(dir);
    *out = h.release();
  });
}

kbcq_status kbcq_dataset_counts(const kbcq_dataset* ds, kbcq_split split,
                                kbcq_label_counts* out) {
  KBCQ_REQUIRE(ds && out, "kbcq_dataset_counts: null argument");
  KBCQ_REQUIRE(split == KBCQ_SPLIT_DEV || split == KBCQ_SPLIT_TEST || split == KBCQ_SPLIT_TOTAL,
               "kbcq_dataset_counts: unknown split");
  kbcq::LabelCounts c;
  if (split != KBCQ_SPLIT_TEST) c += kbcq::count_labels(ds->ds.dev);
  if (split != KBCQ_SPLIT_DEV) c += kbcq::count_labels(ds->ds.test);
  for (int l = 0; l < 4; ++l) {
    out->tail[l] = c.get(static_cast<kbcq::Label>(l), kbcq::Direction::Tail);
    out->head[l] = c.get(static_cast<kbcq::Label>(l), kbcq::Direction::Head);
  }
  return KBCQ_OK;
}

size_t kbcq_dataset_num_retained(const kbcq_dataset* ds) { return ds ? ds->ds.num_retained : 0; }
size_t kbcq_dataset_num_removed(const kbcq_dataset* ds) { return ds ? ds->ds.num_removed() : 0; }
size_t kbcq_dataset_num_relations(const kbcq_dataset* ds) {
  return ds ? ds->ds.relations.size() : 0;
}
size_t kbcq_dataset_num_train(const kbcq_dataset* ds) { return ds ? ds->ds.train.size() : 0; }
size_t kbcq_dataset_warning_count(const kbcq_dataset* ds) {
  return ds ? ds->ds.warnings.size() : 0;
}
const char* kbcq_dataset_warning(const kbcq_dataset* ds, size_t index) {
  return ds && index < ds->ds.warnings.size() ? ds->ds.warnings[index].c_str() : nullptr;
}

const char* kbcq_dataset_checksum(const kbcq_dataset* ds) {
  if (!ds) return nullptr;
  if (ds->checksum.empty()) {
    if (guarded([&] { ds->checksum = kbcq::dataset_checksum(ds->ds); }) != KBCQ_OK) {
      return nullptr;
    }
  }
  return ds->checksum.c_str();
}

void kbcq_dataset_free(kbcq_dataset* ds) { delete ds; }

// ---- models and training ----

const char* kbcq_model_kind_name(kbcq_model_kind kind) {
  if (!valid_kind(kind)) return nullptr;
  return kbcq::model_kind_name(static_cast<kbcq::ModelKind>(kind)).data();
}

kbcq_status kbcq_model_kind_parse(const char* name, kbcq_model_kind* out) {
  KBCQ_REQUIRE(name && out, "kbcq_model_kind_parse: null argument");
  const auto k = kbcq::parse_model_kind(name);
  if (!k) {
    return fail(KBCQ_ERR_PARAMETER, std::string("unsupported model '") + name +
                                        "'; supported: transe, distmult, complex, region");
  }
  *out = static_cast<kbcq_model_kind>(*k);
  return KBCQ_OK;
}

void kbcq_train_config_default(kbcq_train_config* config) {
  if (!config) return;
  const kbcq::TrainConfig d;
  config->kind = static_cast<kbcq_model_kind>(d.kind);
  config->dim = d.dim;
  config->batch_size = d.batch_size;
  config->learning_rate = d.learning_rate;
  config->max_epochs = d.max_epochs;
  config->patience = d.patience;
  config->inverse_relations = d.inverse_relations ? 1 : 0;
  config->seed = d.seed;
  config->adam_beta1 = d.adam_beta1;
  config->adam_beta2 = d.adam_beta2;
  config->adam_epsilon = d.adam_epsilon;
  config->threads = d.threads;
}

kbcq_status kbcq_train_config_check(const kbcq_train_config* config) {
  KBCQ_REQUIRE(config, "kbcq_train_config_check: null argument");
  KBCQ_REQUIRE(valid_kind(config->kind), "unknown model kind");
  return guarded([&] { to_config(*config).validate(); });
}

kbcq_status kbcq_train(const kbcq_dataset* ds, const kbcq_train_config* config,
                       kbcq_epoch_callback callback, void* user, kbcq_model** out) {
  KBCQ_REQUIRE(ds && config && out, "kbcq_train: null argument");
  KBCQ_REQUIRE(valid_kind(config->kind), "unknown model kind");
  *out = nullptr;
  return guarded([&] {
    const auto cfg = to_config(*config);
    kbcq::EpochCallback cb;
    if (callback) {
      cb = [&](const kbcq::EpochLog& e) {
        callback(e.epoch, e.train_loss, e.dev_loss, e.improved ? 1 : 0, user);
      };
    }
    auto result = kbcq::train(ds->ds.train, ds->ds.num_retained, ds->ds.relations.size(),
                              ds->ds.dev, cfg, cb);
    auto h = std::make_unique<kbcq_model>();
    h->ck.params = std::move(result.params);
    h->ck.entities = retained_entities(ds->ds);
    h->ck.relations = ds->ds.relations;
    h->log_json = train_log_json(result.log, cfg);
    h->diverged = result.log.diverged;
    *out = h.release();
  });
}

kbcq_status kbcq_model_init(const kbcq_dataset* ds, kbcq_model_kind kind, size_t dim,
                            uint64_t seed, int inverse_relations, kbcq_model** out) {
  KBCQ_REQUIRE(ds && out, "kbcq_model_init: null argument");
  KBCQ_REQUIRE(valid_kind(kind), "unknown model kind");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<kbcq_model>();
    h->ck.params = kbcq::init_params(static_cast<kbcq::ModelKind>(kind), dim,
                                     ds->ds.num_retained, ds->ds.relations.size(), seed,
                                     inverse_relations != 0);
    h->ck.entities = retained_entities(ds->ds);
    h->ck.relations = ds->ds.relations;
    *out = h.release();
  });
}

kbcq_status kbcq_model_save(kbcq_model* model, const char* path) {
  KBCQ_REQUIRE(model && path, "kbcq_model_save: null argument");
  return guarded([&] {
    kbcq::write_checkpoint(path, model->ck.params, model->ck.entities, model->ck.relations);
    model->path = path;
  });
}

kbcq_status kbcq_model_load(const char* path, kbcq_model** out) {
  KBCQ_REQUIRE(path && out, "kbcq_model_load: null argument");
  *out = nullptr;
  return guarded([&] {
    auto h = std::make_unique<kbcq_model>();
    h->ck = kbcq::read_checkpoint(path);
    h->path = path;
    *out = h.release();
  });
}

kbcq_model_kind kbcq_model_get_kind(const kbcq_model* model) {
  return model ? static_cast<kbcq_model_kind>(model->ck.params.kind) : KBCQ_MODEL_TRANSE;
}
size_t kbcq_model_dim(const kbcq_model* model) { return model ? model->ck.params.dim : 0; }
const char* kbcq_model_train_log_json(const kbcq_model* model) {
  return model ? model->log_json.c_str() : nullptr;
}
int kbcq_model_diverged(const kbcq_model* model) { return model && model->diverged ? 1 : 0; }
void kbcq_model_free(kbcq_model* model) { delete model; }

// ---- evaluation ----

void kbcq_eval_options_default(kbcq_eval_options* options) {
  if (!options) return;
  options->modes = KBCQ_THRESHOLD_GLOBAL | KBCQ_THRESHOLD_PER_RELATION;
  options->split = KBCQ_SPLIT_TEST;
  options->tuning_iterations = 2;
  options->threads = 1;
}

kbcq_status kbcq_evaluate(const kbcq_model* model, const kbcq_dataset* ds,
                          const kbcq_eval_options* options, kbcq_report** out) {
  KBCQ_REQUIRE(model && ds && options && out, "kbcq_evaluate: null argument");
  KBCQ_REQUIRE(options->split == KBCQ_SPLIT_DEV || options->split == KBCQ_SPLIT_TEST,
               "evaluation split must be dev or test");
  KBCQ_REQUIRE(options->modes & (KBCQ_THRESHOLD_GLOBAL | KBCQ_THRESHOLD_PER_RELATION),
               "no threshold mode requested");
  *out = nullptr;
  return guarded([&] {
    kbcq::check_compatible(model->ck, ds->ds);
    kbcq::EvalOptions o;
    o.global = (options->modes & KBCQ_THRESHOLD_GLOBAL) != 0;
    o.per_relation = (options->modes & KBCQ_THRESHOLD_PER_RELATION) != 0;
    o.use_test = options->split == KBCQ_SPLIT_TEST;
    o.tuning_iterations = options->tuning_iterations;
    o.threads = options->threads;
    const kbcq::ModelScorer scorer(model->ck.params);
    auto h = std::make_unique<kbcq_report>();
    h->report = kbcq::evaluate(scorer, ds->ds, o);
    h->report.model = std::string(kbcq::model_kind_name(model->ck.params.kind));
    h->report.dim = model->ck.params.dim;
    h->report.checkpoint = model->path;
    h->report.dataset_checksum = kbcq_dataset_checksum(ds);
    h->json = kbcq::report_to_json(h->report, ds->ds);
    h->tsv = kbcq::report_to_tsv(h->report);
    *out = h.release();
  });
}

double kbcq_report_mrr(const kbcq_report* report) {
  return report ? report->report.mrr : std::nan("");
}

kbcq_status kbcq_report_metrics(const kbcq_report* report, unsigned mode, kbcq_subset subset,
                                double* precision, double* recall, double* f1) {
  KBCQ_REQUIRE(report, "kbcq_report_metrics: null report");
  KBCQ_REQUIRE(subset >= KBCQ_SUBSET_FULL && subset <= KBCQ_SUBSET_I, "unknown subset");
  const auto* m = find_mode(report->report, mode);
  if (!m) return fail(KBCQ_ERR_INVALID_ARGUMENT, "threshold mode not present in report");
  const auto& prf = m->subsets[subset];
  if (precision) *precision = prf.precision;
  if (recall) *recall = prf.recall;
  if (f1) *f1 = prf.f1;
  return KBCQ_OK;
}

kbcq_status kbcq_report_dev_f1(const kbcq_report* report, unsigned mode, double* f1) {
  KBCQ_REQUIRE(report && f1, "kbcq_report_dev_f1: null argument");
  const auto* m = find_mode(report->report, mode);
  if (!m) return fail(KBCQ_ERR_INVALID_ARGUMENT, "threshold mode not present in report");
  *f1 = m->dev_f1;
  return KBCQ_OK;
}

const char* kbcq_report_json(const kbcq_report* report) {
  return report ? report->json.c_str() : nullptr;
}
const char* kbcq_report_tsv(const kbcq_report* report) {
  return report ? report->tsv.c_str() : nullptr;
}
void kbcq_report_free(kbcq_report* report) { delete report; }

}  // extern "C"
