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

// Embedding models: parameter tables, scoring functions, probability heads
// and analytic gradients of the KvsAll binary cross-entropy loss.
//
// Relation tables hold 2|R| rows: row r is the forward relation and row
// r + |R| its separately embedded inverse. ComplEx rows store real parts in
// columns [0, d) and imaginary parts in [d, 2d).

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kbcq/common.hpp"
#include "kbcq/kb.hpp"

namespace kbcq {

enum class ModelKind : std::uint8_t { TransE, DistMult, ComplEx, Region };

std::string_view model_kind_name(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view name);

/// Probabilities are clipped into [kProbabilityClip, 1 - kProbabilityClip]
/// inside the cross-entropy.
inline constexpr double kProbabilityClip = 1e-7;

struct ModelParams {
  ModelKind kind = ModelKind::TransE;
  std::size_t dim = 0;
  std::size_t num_entities = 0;
  std::size_t num_relations = 0;
  bool inverse_relations = true;
  Matrix entity;    // num_entities x width()
  Matrix relation;  // 2 * num_relations x width()
  Matrix scale;     // Region only: 2 * num_relations x dim

  std::size_t width() const { return kind == ModelKind::ComplEx ? 2 * dim : dim; }
  bool normalizes_entities() const {
    return kind == ModelKind::TransE || kind == ModelKind::Region;
  }
  bool uses_tanh_head() const { return normalizes_entities(); }

  /// Relation row used to score q: the inverse row for head queries when
  /// inverse relations are enabled, the forward row otherwise.
  RelationId scored_row(const Query& q) const {
    return q.direction == Direction::Head && inverse_relations
               ? static_cast<RelationId>(q.relation + num_relations)
               : q.relation;
  }

  /// The (head, row, tail) cell scored when completing q with `entity`.
  Triple scored_triple(const Query& q, EntityId entity) const {
    if (q.direction == Direction::Tail) return {q.anchor, q.relation, entity};
    if (inverse_relations) return {q.anchor, scored_row(q), entity};
    return {entity, q.relation, q.anchor};
  }

  /// Same shape, all zeros.
  ModelParams zeros_like() const;

  bool operator==(const ModelParams&) const = default;
};

/// Uniform init in [-1/sqrt(d), 1/sqrt(d)]; TransE/Region entity rows are
/// L2-normalized and Region scales start at 1. Only TransE may disable
/// inverse relations.
ModelParams init_params(ModelKind kind, std::size_t dim, std::size_t num_entities,
                        std::size_t num_relations, std::uint64_t seed,
                        bool inverse_relations = true);

/// TransE: L1 distance. DistMult: trilinear product. ComplEx:
/// Re(<h, r, conj(t)>). Region: sum_k s_k^2 (h + r - t)_k^2. `row` indexes
/// the 2|R| relation table.
double raw_score(const ModelParams& p, EntityId head, RelationId row, EntityId tail);

/// 1 - tanh(raw) for TransE/Region, sigmoid(raw) for DistMult/ComplEx.
double probability_from_raw(ModelKind kind, double raw);

double probability(const ModelParams& p, EntityId head, RelationId row, EntityId tail);

/// Probability of q ∘ entity under the model's head-query convention.
double completion_probability(const ModelParams& p, const Query& q, EntityId entity);

/// Squared L2 TransE distance, exposed for the Region special-case check.
double transe_l2_squared(const ModelParams& p, EntityId head, RelationId row,
                         EntityId tail);

void score_all(const ModelParams& p, const Query& q, std::span<double> out);
std::vector<double> score_all(const ModelParams& p, const Query& q);

/// Clipped binary cross-entropy of prediction p against target y.
double bce(double p, double y);

/// One KvsAll example: targets are 1 on `positives` and 0 elsewhere; cells in
/// `masked` are excluded. Both lists are sorted entity ids.
struct LossItem {
  Query query;
  std::span<const EntityId> positives;
  std::span<const EntityId> masked;
};

struct LossResult {
  double loss = 0.0;  // mean over unmasked cells
  std::size_t cells = 0;
};

/// Mean BCE over all unmasked (query, entity) cells. When `grads` is given it
/// receives the gradient of that mean, shaped like `p` (it is overwritten).
/// Per-worker gradient buffers are reduced in worker order.
LossResult loss_and_gradients(const ModelParams& p, std::span<const LossItem> batch,
                              ModelParams* grads, unsigned threads = 1);

/// Re-projects TransE/Region entity rows onto the unit L2 sphere.
void normalize_entities(ModelParams& p);

// --- checkpoints ---

struct Checkpoint {
  ModelParams params;
  SymbolTable entities;
  SymbolTable relations;
};

void write_checkpoint(const std::filesystem::path& path, const ModelParams& p,
                      const SymbolTable& entities, const SymbolTable& relations);
std::string serialize_checkpoint(const ModelParams& p, const SymbolTable& entities,
                                 const SymbolTable& relations);
Checkpoint read_checkpoint(const std::filesystem::path& path);
Checkpoint parse_checkpoint(std::string_view text);

}  // namespace kbcq
