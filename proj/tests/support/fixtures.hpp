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

// Synthetic knowledge bases, scorers and brute-force reference metrics
// shared by the unit and acceptance tests.

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kbcq/dataset.hpp"
#include "kbcq/evaluator.hpp"
#include "kbcq/kb.hpp"
#include "kbcq/model.hpp"

namespace kbcq::testing {

struct NamedTriple {
  std::string head, relation, tail;
};

inline std::string to_tsv(const std::vector<NamedTriple>& triples) {
  std::string out;
  for (const auto& t : triples) out += t.head + '\t' + t.relation + '\t' + t.tail + '\n';
  return out;
}

/// In-memory equivalent of load_knowledge_base (without the disjointness
/// check) plus an optional type system.
inline KnowledgeBase kb_from_text(const std::string& train, const std::string& valid,
                                  const std::string& test, const std::string& entity_types = "",
                                  const std::string& signatures = "") {
  KnowledgeBase kb;
  std::istringstream tr(train), va(valid), te(test);
  kb.train = parse_triples(tr, "train", kb.entities, kb.relations, &kb.warnings);
  kb.valid = parse_triples(va, "valid", kb.entities, kb.relations, &kb.warnings);
  kb.test = parse_triples(te, "test", kb.entities, kb.relations, &kb.warnings);
  std::istringstream et(entity_types), sg(signatures);
  kb.types = parse_type_system(et, sg, kb.entities, kb.relations, &kb.warnings);
  return kb;
}

/// Typed random KB: 4 entity types (entity i has type i % 4, every 25th
/// entity untyped), 6 relations with fixed signatures, triples respecting
/// the signatures, split 80/10/10.
inline KnowledgeBase typed_synthetic_kb(std::size_t num_entities, std::size_t num_triples,
                                        std::uint64_t seed) {
  Rng rng(seed);
  const char* type_names[] = {"person", "place", "org", "work"};
  const std::pair<int, int> sig[] = {{0, 1}, {0, 2}, {2, 1}, {3, 0}, {1, 1}, {0, 3}};
  std::vector<std::vector<std::size_t>> by_type(4);
  for (std::size_t i = 0; i < num_entities; ++i) by_type[i % 4].push_back(i);

  std::set<std::tuple<std::size_t, int, std::size_t>> seen;
  std::vector<NamedTriple> all;
  auto add = [&](std::size_t h, int r, std::size_t t) {
    if (h == t || !seen.insert({h, r, t}).second) return;
    all.push_back({"e" + std::to_string(h), "r" + std::to_string(r), "e" + std::to_string(t)});
  };
  // One triple per entity first so every entity is interned.
  const int domain_relation[] = {0, 4, 2, 3};
  for (std::size_t e = 0; e < num_entities; ++e) {
    const int r = domain_relation[e % 4];
    const auto& ts = by_type[sig[r].second];
    add(e, r, ts[rng.below(ts.size())]);
  }
  while (all.size() < num_triples) {
    const int r = static_cast<int>(rng.below(6));
    const auto& hs = by_type[sig[r].first];
    const auto& ts = by_type[sig[r].second];
    add(hs[rng.below(hs.size())], r, ts[rng.below(ts.size())]);
  }
  std::vector<std::size_t> order(all.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<NamedTriple> train, valid, test;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& t = all[order[k]];
    if (k * 10 < order.size() * 8) {
      train.push_back(t);
    } else if (k * 10 < order.size() * 9) {
      valid.push_back(t);
    } else {
      test.push_back(t);
    }
  }
  std::string types, sigs;
  for (std::size_t i = 0; i < num_entities; ++i) {
    if (i % 25 == 24) continue;
    types += "e" + std::to_string(i) + '\t' + type_names[i % 4] + '\n';
  }
  for (int r = 0; r < 6; ++r) {
    sigs += "r" + std::to_string(r) + '\t' + type_names[sig[r].first] + '\t' +
            type_names[sig[r].second] + '\n';
  }
  return kb_from_text(to_tsv(train), to_tsv(valid), to_tsv(test), types, sigs);
}

/// Untyped random KB over a fixed entity and relation count.
inline KnowledgeBase random_kb(std::size_t num_entities, std::size_t num_relations,
                               std::size_t num_triples, std::uint64_t seed,
                               double held_out = 0.3) {
  Rng rng(seed);
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
  std::vector<NamedTriple> train, valid;
  // Entities and relations are interned in index order.
  for (std::size_t i = 0; i < num_entities; ++i) {
    const std::size_t t = (i + 1) % num_entities;
    const std::size_t r = i % num_relations;
    seen.insert({i, r, t});
    train.push_back({"e" + std::to_string(i), "r" + std::to_string(r), "e" + std::to_string(t)});
  }
  while (seen.size() < num_triples) {
    const std::size_t h = rng.below(num_entities), t = rng.below(num_entities);
    const std::size_t r = rng.below(num_relations);
    if (!seen.insert({h, r, t}).second) continue;
    NamedTriple nt{"e" + std::to_string(h), "r" + std::to_string(r), "e" + std::to_string(t)};
    (rng.unit() < held_out ? valid : train).push_back(nt);
  }
  return kb_from_text(to_tsv(train), to_tsv(valid), "");
}

/// Layered block KB: `layers` layers of `blocks` blocks of `size` entities.
/// Relation r links every entity of block i in layer r to every entity of
/// block (i + r) % blocks in layer r + 1. For each linked block pair the
/// diagonal p -> (p + j) % size is held out, so every held-out query has
/// exactly one held-out answer and all other answers are in train.
inline KnowledgeBase layered_block_kb(std::size_t layers = 5, std::size_t blocks = 4,
                                      std::size_t size = 10) {
  std::vector<NamedTriple> train, valid;
  auto name = [&](std::size_t layer, std::size_t block, std::size_t p) {
    return "e" + std::to_string((layer * blocks + block) * size + p);
  };
  for (std::size_t r = 0; r + 1 < layers; ++r) {
    for (std::size_t i = 0; i < blocks; ++i) {
      const std::size_t target = (i + r) % blocks;
      const std::size_t j = (r * 7 + i * 3) % size;
      for (std::size_t p = 0; p < size; ++p) {
        for (std::size_t q = 0; q < size; ++q) {
          NamedTriple t{name(r, i, p), "r" + std::to_string(r), name(r + 1, target, q)};
          (q == (p + j) % size ? valid : train).push_back(t);
        }
      }
    }
  }
  return kb_from_text(to_tsv(train), to_tsv(valid), "");
}

/// Scores 1 on the gold completions of the given records and 0 elsewhere.
class OracleScorer final : public Scorer {
 public:
  OracleScorer(std::size_t num_entities, std::size_t num_relations,
               std::initializer_list<std::span<const AnswerRecord>> splits)
      : num_entities_(num_entities), num_relations_(num_relations) {
    for (auto split : splits) {
      for (const auto& rec : split) {
        auto& g = gold_[rec.query];
        g.insert(rec.final_answers.begin(), rec.final_answers.end());
      }
    }
  }
  std::size_t num_entities() const override { return num_entities_; }
  std::size_t num_threshold_rows() const override { return 2 * num_relations_; }
  RelationId threshold_row(const Query& q) const override {
    return q.direction == Direction::Head ? q.relation + static_cast<RelationId>(num_relations_)
                                          : q.relation;
  }
  void score_all(const Query& q, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    const auto it = gold_.find(q);
    if (it == gold_.end()) return;
    for (auto e : it->second) out[e] = 1.0;
  }

 private:
  std::size_t num_entities_, num_relations_;
  std::map<Query, std::set<EntityId>> gold_;
};

/// Applies x -> x^3 to another scorer's outputs.
class CubedScorer final : public Scorer {
 public:
  explicit CubedScorer(const Scorer& inner) : inner_(inner) {}
  std::size_t num_entities() const override { return inner_.num_entities(); }
  std::size_t num_threshold_rows() const override { return inner_.num_threshold_rows(); }
  RelationId threshold_row(const Query& q) const override { return inner_.threshold_row(q); }
  void score_all(const Query& q, std::span<double> out) const override {
    inner_.score_all(q, out);
    for (double& v : out) v = v * v * v;
  }

 private:
  const Scorer& inner_;
};

// --- finite differences ---

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

/// |a - n| / max(|a|, |n|, 1e-6).
inline double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale;
}

/// Compares loss_and_gradients against central differences with the given
/// step on random parameters and a random masked batch over 6 entities and
/// 2 relations. Points where a cell probability sits in the clipped band, or
/// (TransE) where some |h + r - t|_k is near the L1 kink, are resampled.
inline GradCheck gradient_check(ModelKind kind, std::size_t dim, std::uint64_t seed,
                                double step = 1e-4) {
  constexpr std::size_t kEntities = 6, kRelations = 2;
  Rng rng(seed, 0x6772616400ull);
  std::vector<Query> queries{{Direction::Tail, 0, 0}, {Direction::Head, 3, 1},
                             {Direction::Tail, 5, 1}};
  std::vector<std::vector<EntityId>> positives{{1, 2}, {0}, {}};
  std::vector<std::vector<EntityId>> masked{{4}, {2, 5}, {0}};
  std::vector<LossItem> batch;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    batch.push_back({queries[i], positives[i], masked[i]});
  }

  ModelParams p;
  for (;;) {
    p = init_params(kind, dim, kEntities, kRelations, rng.next());
    for (double& v : p.relation.values()) v = rng.uniform(-0.8, 0.8);
    for (double& v : p.scale.values()) v = rng.uniform(0.5, 1.5);
    if (!p.normalizes_entities()) {
      for (double& v : p.entity.values()) v = rng.uniform(-0.8, 0.8);
    }
    bool resample = false;
    for (const auto& item : batch) {
      for (EntityId e = 0; e < kEntities; ++e) {
        const Triple c = p.scored_triple(item.query, e);
        const double prob = probability(p, c.head, c.relation, c.tail);
        resample |= prob < 1e-6 || prob > 1 - 1e-6;
        if (kind != ModelKind::TransE) continue;
        for (std::size_t k = 0; k < dim; ++k) {
          const double diff = p.entity(c.head, k) + p.relation(c.relation, k) - p.entity(c.tail, k);
          resample |= std::abs(diff) < 10 * step;
        }
      }
    }
    if (!resample) break;
  }

  ModelParams grads;
  loss_and_gradients(p, batch, &grads);
  GradCheck out;
  auto check = [&](Matrix& values, const Matrix& analytic) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values.values()[i];
      values.values()[i] = saved + step;
      const double up = loss_and_gradients(p, batch, nullptr).loss;
      values.values()[i] = saved - step;
      const double down = loss_and_gradients(p, batch, nullptr).loss;
      values.values()[i] = saved;
      const double numeric = (up - down) / (2 * step);
      out.max_rel_error = std::max(out.max_rel_error, relative_error(analytic.values()[i], numeric));
      ++out.checked;
    }
  };
  check(p.entity, grads.entity);
  check(p.relation, grads.relation);
  check(p.scale, grads.scale);
  return out;
}

// --- brute-force references ---

/// Rank by fully sorting the candidate list, ties ordered against the target.
inline std::size_t reference_rank(const ModelParams& p, const Query& q, EntityId target,
                                  const TripleSet& train) {
  struct Cand {
    double score;
    bool is_target;
  };
  std::vector<Cand> cands;
  for (EntityId e = 0; e < p.num_entities; ++e) {
    const Triple t = q.complete(e);
    if (e != target && train.contains(t)) continue;
    cands.push_back({completion_probability(p, q, e), e == target});
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.score != b.score) return a.score > b.score;
    return !a.is_target && b.is_target;
  });
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (cands[i].is_target) return i + 1;
  }
  return 0;
}

inline double reference_mrr(const ModelParams& p, std::span<const AnswerRecord> records,
                            const TripleSet& train) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& rec : records) {
    for (auto a : rec.final_answers) {
      sum += 1.0 / static_cast<double>(reference_rank(p, rec.query, a, train));
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

/// Per-cell confusion matrix under the given thresholds.
inline Confusion reference_confusion(const ModelParams& p, std::span<const AnswerRecord> records,
                                     const ThresholdSet& th, const TripleSet& train,
                                     Subset subset) {
  Confusion c;
  for (const auto& rec : records) {
    if (!in_subset(rec.label, subset)) continue;
    const double tau = th.threshold_for(p.scored_row(rec.query));
    for (EntityId e = 0; e < p.num_entities; ++e) {
      const bool gold = std::find(rec.final_answers.begin(), rec.final_answers.end(), e) !=
                        rec.final_answers.end();
      const bool predicted =
          !train.contains(rec.query.complete(e)) && completion_probability(p, rec.query, e) > tau;
      if (predicted && gold) ++c.tp;
      if (predicted && !gold) ++c.fp;
      if (!predicted && gold) ++c.fn;
    }
  }
  return c;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("kbcq_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

}  // namespace kbcq::testing
