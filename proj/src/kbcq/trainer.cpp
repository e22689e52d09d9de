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

#include "kbcq/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace kbcq {

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::Parameter, msg); };
  if (dim == 0) fail("dim must be positive");
  if (batch_size == 0) fail("batch size must be positive");
  if (!(learning_rate > 0)) fail("learning rate must be positive");
  if (patience < 1) fail("patience must be at least 1");
  if (max_epochs == 0) fail("max epochs must be positive");
  if (!(adam_beta1 >= 0 && adam_beta1 < 1) || !(adam_beta2 >= 0 && adam_beta2 < 1)) {
    fail("Adam betas must lie in [0, 1)");
  }
  if (!(adam_epsilon > 0)) fail("Adam epsilon must be positive");
  if (!inverse_relations && kind != ModelKind::TransE) {
    fail("disabling inverse relations is supported for TransE only");
  }
}

std::vector<std::string> TrainConfig::off_grid_notes() const {
  std::vector<std::string> notes;
  if (dim != 64 && dim != 128) notes.push_back("dim " + std::to_string(dim) + " outside {64, 128}");
  if (batch_size != 256 && batch_size != 512 && batch_size != 1024) {
    notes.push_back("batch size " + std::to_string(batch_size) + " outside {256, 512, 1024}");
  }
  if (learning_rate != 0.001 && learning_rate != 0.0001) {
    notes.push_back("learning rate " + format_double(learning_rate) + " outside {0.001, 0.0001}");
  }
  if (max_epochs != 200) notes.push_back("max epochs " + std::to_string(max_epochs) + " != 200");
  if (patience != 50) notes.push_back("patience " + std::to_string(patience) + " != 50");
  return notes;
}

std::vector<TrainingExample> build_training_examples(const TripleSet& train) {
  if (train.empty()) throw Error(ErrorCode::Parameter, "training set is empty");
  std::map<Query, std::vector<EntityId>> groups;
  for (const auto& t : train) {
    groups[{Direction::Tail, t.head, t.relation}].push_back(t.tail);
    groups[{Direction::Head, t.tail, t.relation}].push_back(t.head);
  }
  std::vector<TrainingExample> out;
  out.reserve(groups.size());
  for (auto& [q, pos] : groups) {
    std::sort(pos.begin(), pos.end());
    out.push_back({q, std::move(pos)});
  }
  return out;
}

AdamState make_adam_state(const ModelParams& params) {
  return {0, params.zeros_like(), params.zeros_like()};
}

void adam_step(AdamState& state, ModelParams& params, const ModelParams& grads,
               double learning_rate, double beta1, double beta2, double epsilon) {
  if (grads.entity.size() != params.entity.size() ||
      grads.relation.size() != params.relation.size() ||
      grads.scale.size() != params.scale.size() ||
      state.first.entity.size() != params.entity.size()) {
    throw Error(ErrorCode::InvalidArgument, "Adam: parameter and gradient shapes differ");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(beta1, t);
  const double c2 = 1.0 - std::pow(beta2, t);

  auto update = [&](std::span<double> w, std::span<const double> g, std::span<double> m,
                    std::span<double> v, const char* table) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
      const double step = learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + epsilon);
      const double next = w[i] - step;
      if (!std::isfinite(next)) {
        throw Error(ErrorCode::Numerical, std::string("Adam produced a non-finite value in the ") +
                                              table + " table at index " + std::to_string(i) +
                                              " (step " + std::to_string(state.step) + ")");
      }
      w[i] = next;
    }
  };
  update(params.entity.values(), grads.entity.values(), state.first.entity.values(),
         state.second.entity.values(), "entity");
  update(params.relation.values(), grads.relation.values(), state.first.relation.values(),
         state.second.relation.values(), "relation");
  update(params.scale.values(), grads.scale.values(), state.first.scale.values(),
         state.second.scale.values(), "scale");
  normalize_entities(params);
}

double dev_loss(const ModelParams& params, std::span<const AnswerRecord> dev,
                const TripleSet& train, unsigned threads) {
  std::vector<std::vector<EntityId>> masks(dev.size());
  std::vector<LossItem> items;
  items.reserve(dev.size());
  for (std::size_t i = 0; i < dev.size(); ++i) {
    const auto known = train.completions(dev[i].query);
    masks[i].assign(known.begin(), known.end());
    std::sort(masks[i].begin(), masks[i].end());
    items.push_back({dev[i].query, dev[i].final_answers, masks[i]});
  }
  return loss_and_gradients(params, items, nullptr, threads).loss;
}

TrainResult train(const TripleSet& train_triples, std::size_t num_entities,
                  std::size_t num_relations, std::span<const AnswerRecord> dev,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (dev.empty()) throw Error(ErrorCode::Parameter, "early stopping needs a non-empty dev set");

  const auto examples = build_training_examples(train_triples);
  ModelParams params = init_params(config.kind, config.dim, num_entities, num_relations,
                                   config.seed, config.inverse_relations);
  TrainState state;
  state.adam = make_adam_state(params);
  state.best = params;

  TrainResult result;
  auto& log = result.log;
  std::vector<std::size_t> order(examples.size());
  ModelParams grads = params.zeros_like();
  std::vector<LossItem> batch;
  batch.reserve(config.batch_size);

  try {
    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
      state.epoch = epoch;
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      Rng(config.seed, epoch).shuffle(order);

      double loss_sum = 0.0;
      std::size_t cells = 0;
      for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
        const std::size_t end = std::min(order.size(), start + config.batch_size);
        batch.clear();
        for (std::size_t k = start; k < end; ++k) {
          const auto& ex = examples[order[k]];
          batch.push_back({ex.query, ex.positives, {}});
        }
        const auto res = loss_and_gradients(params, batch, &grads, config.threads);
        loss_sum += res.loss * static_cast<double>(res.cells);
        cells += res.cells;
        adam_step(state.adam, params, grads, config.learning_rate, config.adam_beta1,
                  config.adam_beta2, config.adam_epsilon);
      }

      EpochLog entry;
      entry.epoch = epoch;
      entry.train_loss = cells ? loss_sum / static_cast<double>(cells) : 0.0;
      entry.dev_loss = dev_loss(params, dev, train_triples, config.threads);
      if (!std::isfinite(entry.dev_loss)) {
        throw Error(ErrorCode::Numerical, "dev loss is not finite at epoch " + std::to_string(epoch));
      }
      if (entry.dev_loss < state.best_dev_loss) {
        entry.improved = true;
        state.best_dev_loss = entry.dev_loss;
        state.best = params;
        state.epochs_since_improvement = 0;
        log.best_epoch = epoch;
        log.best_dev_loss = entry.dev_loss;
      } else {
        ++state.epochs_since_improvement;
      }
      log.epochs.push_back(entry);
      if (on_epoch) on_epoch(entry);
      if (state.epochs_since_improvement >= config.patience) {
        log.early_stopped = true;
        break;
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Numerical) throw;
    log.diverged = true;
    log.message = e.what();
  }
  result.params = std::move(state.best);
  return result;
}

}  // namespace kbcq
