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

// Ranking (filtered MRR) and classification (thresholded response sets,
// micro-averaged P/R/F1) evaluation, with global and greedy per-relation
// threshold tuning.

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kbcq/dataset.hpp"
#include "kbcq/model.hpp"

namespace kbcq {

/// Anything that can score every completion of a query with a value in
/// [0, 1] and name the relation row whose threshold applies.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::size_t num_entities() const = 0;
  virtual std::size_t num_threshold_rows() const = 0;
  virtual RelationId threshold_row(const Query& q) const = 0;
  virtual void score_all(const Query& q, std::span<double> out) const = 0;
};

class ModelScorer final : public Scorer {
 public:
  explicit ModelScorer(const ModelParams& params) : params_(params) {}
  std::size_t num_entities() const override { return params_.num_entities; }
  std::size_t num_threshold_rows() const override { return 2 * params_.num_relations; }
  RelationId threshold_row(const Query& q) const override { return params_.scored_row(q); }
  void score_all(const Query& q, std::span<double> out) const override {
    kbcq::score_all(params_, q, out);
  }

 private:
  const ModelParams& params_;
};

enum class ThresholdMode { Global, PerRelation };

struct ThresholdSet {
  ThresholdMode mode = ThresholdMode::Global;
  double global = 0.5;
  std::vector<double> per_row;  // 2|R| entries, default 0.5

  static ThresholdSet uniform_global(double tau) { return {ThresholdMode::Global, tau, {}}; }
  static ThresholdSet uniform_rows(std::size_t rows, double tau = 0.5) {
    return {ThresholdMode::PerRelation, tau, std::vector<double>(rows, tau)};
  }
  double threshold_for(RelationId row) const {
    return mode == ThresholdMode::Global ? global : per_row.at(row);
  }
};

enum class Subset { Full = 0, C = 1, CF = 2, I = 3 };
inline constexpr std::array<Subset, 4> kAllSubsets = {Subset::Full, Subset::C, Subset::CF,
                                                      Subset::I};
const char* subset_name(Subset s);
/// full = C ∪ F ∪ I, C∪F = complete plus fake, I includes N.
bool in_subset(Label label, Subset subset);

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  Confusion& operator+=(const Confusion& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const Confusion&) const = default;
  double precision() const { return tp + fp ? double(tp) / double(tp + fp) : 0.0; }
  double recall() const { return tp + fn ? double(tp) / double(tp + fn) : 0.0; }
  /// 2PR / (P + R), zero when undefined.
  double f1() const {
    const double p = precision(), r = recall();
    return p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
  }
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Confusion totals;

  static Prf from(const Confusion& c) { return {c.precision(), c.recall(), c.f1(), c}; }
};

// --- ranking ---

/// {q ∘ i | i ∈ A_q}; empty queries contribute nothing.
TripleSet reconstruct_rank_triples(std::span<const AnswerRecord> records);

/// Pessimistic 1-based rank of `target` among candidates not in `excluded`;
/// the target itself is never excluded.
std::size_t rank_in_scores(std::span<const double> scores, EntityId target,
                           std::span<const EntityId> excluded);

/// Rank of the triple against perturbed tails (Direction::Tail) or heads.
std::size_t rank(const Scorer& scorer, const Triple& triple, Direction direction,
                 const TripleSet& train);

struct MrrResult {
  double mrr = 0.0;
  std::size_t ranked = 0;
};

/// Mean reciprocal rank over every (query, answer) completion; tail-query
/// completions are ranked against perturbed tails and head-query
/// completions against perturbed heads.
MrrResult mrr(const Scorer& scorer, std::span<const AnswerRecord> records,
              const TripleSet& train, unsigned threads = 1);

// --- classification ---

std::vector<EntityId> response_set(std::span<const double> scores, double threshold,
                                   std::span<const EntityId> excluded);
std::vector<EntityId> response_set(const Scorer& scorer, const Query& q, double threshold,
                                   const TripleSet& train);

/// Both inputs sorted.
Confusion classification_counts(const AnswerRecord& record,
                                std::span<const EntityId> response);

Prf micro_f1(const Scorer& scorer, std::span<const AnswerRecord> records,
             const ThresholdSet& thresholds, const TripleSet& train, Subset subset,
             unsigned threads = 1);

// --- tuning ---

/// Threshold grid k/10 for k = 0..10. The per-relation candidates are the
/// subset {0, 0.1, 0.3, 0.5, 0.7, 0.9, 1}.
inline constexpr std::size_t kGridSize = 11;
double grid_value(std::size_t k);
inline constexpr std::array<std::size_t, 7> kRelationGrid = {0, 1, 3, 5, 7, 9, 10};

/// Per-query TP/FP at every grid threshold, computed from one scoring pass.
struct QueryProfile {
  Label label = Label::C;
  RelationId row = 0;
  std::size_t answers = 0;
  std::array<std::size_t, kGridSize> tp{};
  std::array<std::size_t, kGridSize> fp{};

  Confusion at(std::size_t k) const { return {tp[k], fp[k], answers - tp[k]}; }
};

std::vector<QueryProfile> profile_queries(const Scorer& scorer,
                                          std::span<const AnswerRecord> records,
                                          const TripleSet& train, unsigned threads = 1);

struct GlobalTuning {
  double threshold = 0.0;
  double f1 = 0.0;
};

/// Maximizes full-subset micro-F1 over the 11-point grid; ties go to the
/// larger threshold.
GlobalTuning tune_global_threshold(std::span<const QueryProfile> profiles);

struct TuningStep {
  std::size_t iteration = 0;
  RelationId row = 0;
  double threshold = 0.0;
  double f1 = 0.0;  // running best after accepting this step
};

struct RelationTuning {
  ThresholdSet thresholds;
  double initial_f1 = 0.0;  // all rows at 0.5
  double f1 = 0.0;
  std::vector<TuningStep> accepted;
  std::vector<RelationId> order;
};

/// Greedy coordinate search: rows visited in decreasing dev frequency (ties
/// by row index), each trying the 7 candidate thresholds; a candidate is
/// kept only if the full-dev micro-F1 strictly exceeds the running best,
/// which starts at 0 and is shared across rows.
RelationTuning tune_relation_thresholds(std::span<const QueryProfile> profiles,
                                        std::size_t num_rows, std::size_t iterations = 2);

// --- reports ---

struct ThresholdStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t rows = 0;
};

struct ModeReport {
  ThresholdMode mode = ThresholdMode::Global;
  ThresholdSet thresholds;
  std::array<Prf, 4> subsets{};  // indexed by Subset
  double dev_f1 = 0.0;           // full subset, on the tuning split
  ThresholdStats stats;
  std::vector<TuningStep> trace;
};

struct EvalOptions {
  bool global = true;
  bool per_relation = true;
  bool use_test = true;  // false evaluates dev
  std::size_t tuning_iterations = 2;
  unsigned threads = 1;
  std::optional<double> fixed_global;                // skips global tuning
  std::optional<std::vector<double>> fixed_per_row;  // skips relation tuning
};

struct EvalReport {
  std::string split;
  double mrr = 0.0;
  std::size_t ranked = 0;
  std::size_t tuning_iterations = 0;
  std::vector<ModeReport> modes;
  std::string model;
  std::size_t dim = 0;
  std::string dataset_checksum;
  std::string checkpoint;
};

/// Tunes thresholds on dev (unless fixed) and evaluates the requested split.
EvalReport evaluate(const Scorer& scorer, const QueryDataset& ds, const EvalOptions& options);

/// Throws Error(Mismatch) unless the checkpoint was trained on `ds`.
void check_compatible(const Checkpoint& ck, const QueryDataset& ds);

std::string report_to_json(const EvalReport& report, const QueryDataset& ds);
std::string report_to_tsv(const EvalReport& report);

}  // namespace kbcq
