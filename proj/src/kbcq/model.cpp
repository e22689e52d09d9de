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

#include "kbcq/model.hpp"

#include <algorithm>
#include <cmath>

namespace kbcq {

namespace {

struct HeadOutput {
  double prob;
  double dprob_draw;
};

HeadOutput apply_head(ModelKind kind, double raw) {
  if (kind == ModelKind::TransE || kind == ModelKind::Region) {
    // 1 - tanh(x) = 2 e^{-2x} / (1 + e^{-2x}) without the cancellation.
    double q;
    if (raw >= 0) {
      const double e = std::exp(-2.0 * raw);
      q = 2.0 * e / (1.0 + e);
    } else {
      q = 1.0 - std::tanh(raw);
    }
    return {q, -q * (2.0 - q)};
  }
  double s;
  if (raw >= 0) {
    s = 1.0 / (1.0 + std::exp(-raw));
  } else {
    const double e = std::exp(raw);
    s = e / (1.0 + e);
  }
  return {s, s * (1.0 - s)};
}

double sign(double x) { return (x > 0) - (x < 0); }

// Adds g * d(raw)/d(params) for the cell (h, row, t) into grads.
void backprop_raw(const ModelParams& p, const Triple& c, double g, ModelParams& grads) {
  const std::size_t d = p.dim;
  const auto h = p.entity.row(c.head);
  const auto r = p.relation.row(c.relation);
  const auto t = p.entity.row(c.tail);
  auto gh = grads.entity.row(c.head);
  auto gr = grads.relation.row(c.relation);
  auto gt = grads.entity.row(c.tail);
  switch (p.kind) {
    case ModelKind::TransE:
      for (std::size_t k = 0; k < d; ++k) {
        const double s = g * sign((h[k] + r[k]) - t[k]);
        gh[k] += s;
        gr[k] += s;
        gt[k] -= s;
      }
      break;
    case ModelKind::Region: {
      const auto sc = p.scale.row(c.relation);
      auto gs = grads.scale.row(c.relation);
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = (h[k] + r[k]) - t[k];
        const double a = sc[k] * sc[k];
        const double s = g * 2.0 * a * diff;
        gh[k] += s;
        gr[k] += s;
        gt[k] -= s;
        gs[k] += g * 2.0 * sc[k] * diff * diff;
      }
      break;
    }
    case ModelKind::DistMult:
      for (std::size_t k = 0; k < d; ++k) {
        gh[k] += g * r[k] * t[k];
        gr[k] += g * h[k] * t[k];
        gt[k] += g * h[k] * r[k];
      }
      break;
    case ModelKind::ComplEx:
      for (std::size_t k = 0; k < d; ++k) {
        const double hr = h[k], hi = h[d + k];
        const double rr = r[k], ri = r[d + k];
        const double tr = t[k], ti = t[d + k];
        gh[k] += g * (rr * tr + ri * ti);
        gh[d + k] += g * (rr * ti - ri * tr);
        gr[k] += g * (hr * tr + hi * ti);
        gr[d + k] += g * (hr * ti - hi * tr);
        gt[k] += g * (hr * rr - hi * ri);
        gt[d + k] += g * (hi * rr + hr * ri);
      }
      break;
  }
}

}  // namespace

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::TransE: return "transe";
    case ModelKind::DistMult: return "distmult";
    case ModelKind::ComplEx: return "complex";
    case ModelKind::Region: return "region";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  for (auto k : {ModelKind::TransE, ModelKind::DistMult, ModelKind::ComplEx,
                 ModelKind::Region}) {
    if (name == model_kind_name(k)) return k;
  }
  return std::nullopt;
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z;
  z.kind = kind;
  z.dim = dim;
  z.num_entities = num_entities;
  z.num_relations = num_relations;
  z.inverse_relations = inverse_relations;
  z.entity = Matrix(entity.rows(), entity.cols());
  z.relation = Matrix(relation.rows(), relation.cols());
  z.scale = Matrix(scale.rows(), scale.cols());
  return z;
}

ModelParams init_params(ModelKind kind, std::size_t dim, std::size_t num_entities,
                        std::size_t num_relations, std::uint64_t seed,
                        bool inverse_relations) {
  if (dim == 0) throw Error(ErrorCode::Parameter, "embedding dimension must be positive");
  if (!inverse_relations && kind != ModelKind::TransE) {
    throw Error(ErrorCode::Parameter, "only TransE can be trained without inverse relations");
  }
  ModelParams p;
  p.kind = kind;
  p.dim = dim;
  p.num_entities = num_entities;
  p.num_relations = num_relations;
  p.inverse_relations = inverse_relations;
  p.entity = Matrix(num_entities, p.width());
  p.relation = Matrix(2 * num_relations, p.width());

  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  for (double& v : p.entity.values()) v = rng.uniform(-bound, bound);
  for (double& v : p.relation.values()) v = rng.uniform(-bound, bound);
  if (kind == ModelKind::Region) p.scale = Matrix(2 * num_relations, dim, 1.0);
  normalize_entities(p);
  return p;
}

double raw_score(const ModelParams& p, EntityId head, RelationId row, EntityId tail) {
  const std::size_t d = p.dim;
  const auto h = p.entity.row(head);
  const auto r = p.relation.row(row);
  const auto t = p.entity.row(tail);
  double acc = 0.0;
  switch (p.kind) {
    case ModelKind::TransE:
      for (std::size_t k = 0; k < d; ++k) acc += std::abs((h[k] + r[k]) - t[k]);
      break;
    case ModelKind::Region: {
      const auto s = p.scale.row(row);
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = (h[k] + r[k]) - t[k];
        acc += (s[k] * s[k]) * diff * diff;
      }
      break;
    }
    case ModelKind::DistMult:
      for (std::size_t k = 0; k < d; ++k) acc += h[k] * r[k] * t[k];
      break;
    case ModelKind::ComplEx:
      for (std::size_t k = 0; k < d; ++k) {
        const double hr = h[k], hi = h[d + k];
        const double rr = r[k], ri = r[d + k];
        const double tr = t[k], ti = t[d + k];
        acc += hr * rr * tr + hi * rr * ti + hr * ri * ti - hi * ri * tr;
      }
      break;
  }
  return acc;
}

double transe_l2_squared(const ModelParams& p, EntityId head, RelationId row,
                         EntityId tail) {
  const auto h = p.entity.row(head);
  const auto r = p.relation.row(row);
  const auto t = p.entity.row(tail);
  double acc = 0.0;
  for (std::size_t k = 0; k < p.dim; ++k) {
    const double diff = (h[k] + r[k]) - t[k];
    acc += diff * diff;
  }
  return acc;
}

double probability_from_raw(ModelKind kind, double raw) {
  return apply_head(kind, raw).prob;
}

double probability(const ModelParams& p, EntityId head, RelationId row, EntityId tail) {
  return probability_from_raw(p.kind, raw_score(p, head, row, tail));
}

double completion_probability(const ModelParams& p, const Query& q, EntityId entity) {
  const Triple c = p.scored_triple(q, entity);
  return probability(p, c.head, c.relation, c.tail);
}

void score_all(const ModelParams& p, const Query& q, std::span<double> out) {
  for (std::size_t i = 0; i < p.num_entities; ++i) {
    out[i] = completion_probability(p, q, static_cast<EntityId>(i));
  }
}

std::vector<double> score_all(const ModelParams& p, const Query& q) {
  std::vector<double> out(p.num_entities);
  score_all(p, q, out);
  return out;
}

double bce(double p, double y) {
  const double pc = std::clamp(p, kProbabilityClip, 1.0 - kProbabilityClip);
  return -(y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc));
}

LossResult loss_and_gradients(const ModelParams& p, std::span<const LossItem> batch,
                              ModelParams* grads, unsigned threads) {
  LossResult result;
  for (const auto& item : batch) {
    result.cells += p.num_entities - item.masked.size();
  }
  if (grads) *grads = p.zeros_like();
  if (result.cells == 0) return result;

  const unsigned workers = effective_workers(batch.size(), threads);
  std::vector<double> partial_loss(workers, 0.0);
  std::vector<ModelParams> partial_grads;
  if (grads && workers > 1) partial_grads.assign(workers, p.zeros_like());

  parallel_for(batch.size(), threads, [&](std::size_t begin, std::size_t end, unsigned w) {
    // 0 = negative, 1 = positive, 2 = masked
    std::vector<std::uint8_t> cell(p.num_entities);
    ModelParams* g_out = grads ? (workers > 1 ? &partial_grads[w] : grads) : nullptr;
    double loss = 0.0;
    for (std::size_t b = begin; b < end; ++b) {
      const auto& item = batch[b];
      std::fill(cell.begin(), cell.end(), 0);
      for (auto e : item.positives) cell[e] = 1;
      for (auto e : item.masked) cell[e] = 2;
      double item_loss = 0.0;
      for (std::size_t i = 0; i < p.num_entities; ++i) {
        if (cell[i] == 2) continue;
        const double y = cell[i] == 1 ? 1.0 : 0.0;
        const Triple c = p.scored_triple(item.query, static_cast<EntityId>(i));
        const auto out = apply_head(p.kind, raw_score(p, c.head, c.relation, c.tail));
        item_loss += bce(out.prob, y);
        if (g_out) {
          // The clipped probability feeds the derivative's denominators so
          // saturated cells keep a usable gradient.
          const double pc = std::clamp(out.prob, kProbabilityClip, 1.0 - kProbabilityClip);
          const double dloss_dprob = -y / pc + (1.0 - y) / (1.0 - pc);
          backprop_raw(p, c, dloss_dprob * out.dprob_draw, *g_out);
        }
      }
      if (!std::isfinite(item_loss)) {
        throw Error(ErrorCode::Numerical,
                    "non-finite loss for query (anchor " + std::to_string(item.query.anchor) +
                        ", relation " + std::to_string(item.query.relation) + ", " +
                        (item.query.direction == Direction::Tail ? "tail" : "head") + ")");
      }
      loss += item_loss;
    }
    partial_loss[w] = loss;
  });

  double total = 0.0;
  for (double l : partial_loss) total += l;
  const double inv = 1.0 / static_cast<double>(result.cells);
  result.loss = total * inv;

  if (grads) {
    for (const auto& part : partial_grads) {
      auto add = [](std::span<double> dst, std::span<const double> src) {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
      };
      add(grads->entity.values(), part.entity.values());
      add(grads->relation.values(), part.relation.values());
      add(grads->scale.values(), part.scale.values());
    }
    for (double& v : grads->entity.values()) v *= inv;
    for (double& v : grads->relation.values()) v *= inv;
    for (double& v : grads->scale.values()) v *= inv;
  }
  return result;
}

void normalize_entities(ModelParams& p) {
  if (!p.normalizes_entities()) return;
  for (std::size_t e = 0; e < p.entity.rows(); ++e) {
    auto row = p.entity.row(e);
    double sq = 0.0;
    for (double v : row) sq += v * v;
    const double norm = std::sqrt(sq);
    if (norm > 0) {
      for (double& v : row) v /= norm;
    }
  }
}

}  // namespace kbcq
