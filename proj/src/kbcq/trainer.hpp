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

// KvsAll training with Adam and dev-loss early stopping.

#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "kbcq/dataset.hpp"
#include "kbcq/model.hpp"

namespace kbcq {

struct TrainConfig {
  ModelKind kind = ModelKind::TransE;
  std::size_t dim = 64;
  std::size_t batch_size = 256;
  double learning_rate = 0.001;
  std::size_t max_epochs = 200;
  std::size_t patience = 50;
  bool inverse_relations = true;  // may be false for TransE only
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  unsigned threads = 1;

  /// Throws Error(Parameter) on an unusable configuration.
  void validate() const;
  /// Human-readable notes for every value outside the reference grid.
  std::vector<std::string> off_grid_notes() const;
};

/// One KvsAll example: all entities completing `query` in the training set.
struct TrainingExample {
  Query query;
  std::vector<EntityId> positives;  // sorted
};

/// One tail example per distinct (h, r) and one head example per distinct
/// (r, t), ordered by query. Whether head examples are scored through the
/// inverse relation row is a property of the model, not of the examples.
std::vector<TrainingExample> build_training_examples(const TripleSet& train);

struct AdamState {
  std::size_t step = 0;
  ModelParams first;
  ModelParams second;
};

AdamState make_adam_state(const ModelParams& params);

/// Bias-corrected Adam update followed by entity re-normalization for the
/// translation models.
void adam_step(AdamState& state, ModelParams& params, const ModelParams& grads,
               double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
               double epsilon = 1e-8);

/// Mean per-cell BCE over dev queries. Targets are the final answers; every
/// entity completing a query to a training triple is masked out.
double dev_loss(const ModelParams& params, std::span<const AnswerRecord> dev,
                const TripleSet& train, unsigned threads = 1);

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_loss = 0.0;
  bool improved = false;
};

struct TrainLog {
  std::vector<EpochLog> epochs;
  std::size_t best_epoch = 0;  // 0 when no epoch completed
  double best_dev_loss = std::numeric_limits<double>::infinity();
  bool early_stopped = false;
  bool diverged = false;
  std::string message;
};

struct TrainState {
  std::size_t epoch = 0;
  AdamState adam;
  double best_dev_loss = std::numeric_limits<double>::infinity();
  ModelParams best;
  std::size_t epochs_since_improvement = 0;
};

struct TrainResult {
  ModelParams params;  // best-dev snapshot
  TrainLog log;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Trains from a fresh init. A numerical failure stops training and returns
/// the best snapshot so far with log.diverged set.
TrainResult train(const TripleSet& train_triples, std::size_t num_entities,
                  std::size_t num_relations, std::span<const AnswerRecord> dev,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace kbcq
