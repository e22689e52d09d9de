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

#include "kbcq/evaluator.hpp"

#include <algorithm>
#include <cmath>

namespace kbcq {

namespace {

std::vector<EntityId> sorted_known(const TripleSet& train, const Query& q) {
  const auto known = train.completions(q);
  std::vector<EntityId> out(known.begin(), known.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::array<Confusion, 4> split_by_subset(std::span<const Label> labels,
                                         std::span<const Confusion> per_record) {
  std::array<Confusion, 4> out{};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (auto s : kAllSubsets) {
      if (in_subset(labels[i], s)) out[static_cast<int>(s)] += per_record[i];
    }
  }
  return out;
}

// Every subset's totals from one scoring pass under arbitrary thresholds.
std::array<Confusion, 4> subset_totals(const Scorer& scorer,
                                       std::span<const AnswerRecord> records,
                                       const ThresholdSet& thresholds, const TripleSet& train,
                                       unsigned threads) {
  std::vector<Confusion> per_record(records.size());
  std::vector<Label> labels(records.size());
  parallel_for(records.size(), threads, [&](std::size_t begin, std::size_t end, unsigned) {
    std::vector<double> scores(scorer.num_entities());
    for (std::size_t i = begin; i < end; ++i) {
      const auto& rec = records[i];
      scorer.score_all(rec.query, scores);
      const double tau = thresholds.threshold_for(scorer.threshold_row(rec.query));
      const auto response = response_set(scores, tau, sorted_known(train, rec.query));
      per_record[i] = classification_counts(rec, response);
      labels[i] = rec.label;
    }
  });
  return split_by_subset(labels, per_record);
}

// Grid index of tau, if tau is exactly a grid value.
std::optional<std::size_t> grid_index(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) return std::nullopt;
  const auto k = static_cast<std::size_t>(std::lround(tau * 10.0));
  if (grid_value(k) == tau) return k;
  return std::nullopt;
}

std::array<Confusion, 4> profile_totals(std::span<const QueryProfile> profiles,
                                        const ThresholdSet& thresholds) {
  std::array<Confusion, 4> out{};
  for (const auto& p : profiles) {
    const auto k = *grid_index(thresholds.threshold_for(p.row));
    const auto c = p.at(k);
    for (auto s : kAllSubsets) {
      if (in_subset(p.label, s)) out[static_cast<int>(s)] += c;
    }
  }
  return out;
}

bool on_grid(const ThresholdSet& t) {
  if (t.mode == ThresholdMode::Global) return grid_index(t.global).has_value();
  return std::all_of(t.per_row.begin(), t.per_row.end(),
                     [](double v) { return grid_index(v).has_value(); });
}

void check_thresholds(const ThresholdSet& t, std::size_t rows) {
  auto valid = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (t.mode == ThresholdMode::Global) {
    if (!valid(t.global)) throw Error(ErrorCode::InvalidArgument, "global threshold outside [0, 1]");
    return;
  }
  if (t.per_row.size() != rows) {
    throw Error(ErrorCode::InvalidArgument,
                "per-relation thresholds need " + std::to_string(rows) + " rows, got " +
                    std::to_string(t.per_row.size()));
  }
  for (double v : t.per_row) {
    if (!valid(v)) throw Error(ErrorCode::InvalidArgument, "relation threshold outside [0, 1]");
  }
}

std::vector<RelationId> rows_present(std::span<const QueryProfile> profiles, std::size_t rows) {
  std::vector<std::size_t> freq(rows, 0);
  for (const auto& p : profiles) ++freq.at(p.row);
  std::vector<RelationId> out;
  for (std::size_t r = 0; r < rows; ++r) {
    if (freq[r] > 0) out.push_back(static_cast<RelationId>(r));
  }
  std::stable_sort(out.begin(), out.end(),
                   [&](RelationId a, RelationId b) { return freq[a] > freq[b]; });
  return out;
}

ThresholdStats stats_over(const std::vector<double>& values, std::span<const RelationId> rows) {
  ThresholdStats st;
  std::vector<double> picked;
  if (rows.empty()) {
    picked = values;
  } else {
    for (auto r : rows) picked.push_back(values[r]);
  }
  if (picked.empty()) return st;
  st.rows = picked.size();
  st.min = *std::min_element(picked.begin(), picked.end());
  st.max = *std::max_element(picked.begin(), picked.end());
  double sum = 0.0;
  for (double v : picked) sum += v;
  st.mean = sum / static_cast<double>(picked.size());
  return st;
}

}  // namespace

const char* subset_name(Subset s) {
  switch (s) {
    case Subset::Full: return "full";
    case Subset::C: return "C";
    case Subset::CF: return "C+F";
    case Subset::I: return "I";
  }
  return "?";
}

bool in_subset(Label label, Subset subset) {
  switch (subset) {
    case Subset::Full: return true;
    case Subset::C: return label == Label::C;
    case Subset::CF: return label == Label::C || label == Label::F;
    case Subset::I: return label == Label::I || label == Label::N;
  }
  return false;
}

TripleSet reconstruct_rank_triples(std::span<const AnswerRecord> records) {
  TripleSet out;
  for (const auto& rec : records) {
    for (auto e : rec.final_answers) out.insert(rec.query.complete(e));
  }
  return out;
}

std::size_t rank_in_scores(std::span<const double> scores, EntityId target,
                           std::span<const EntityId> excluded) {
  std::vector<std::uint8_t> skip(scores.size(), 0);
  for (auto e : excluded) {
    if (e < skip.size()) skip[e] = 1;
  }
  skip.at(target) = 0;
  const double s = scores[target];
  std::size_t rank = 1;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i != target && !skip[i] && scores[i] >= s) ++rank;
  }
  return rank;
}

std::size_t rank(const Scorer& scorer, const Triple& triple, Direction direction,
                 const TripleSet& train) {
  const Query q = direction == Direction::Tail ? Query{Direction::Tail, triple.head, triple.relation}
                                               : Query{Direction::Head, triple.tail, triple.relation};
  const EntityId target = direction == Direction::Tail ? triple.tail : triple.head;
  std::vector<double> scores(scorer.num_entities());
  scorer.score_all(q, scores);
  return rank_in_scores(scores, target, train.completions(q));
}

MrrResult mrr(const Scorer& scorer, std::span<const AnswerRecord> records,
              const TripleSet& train, unsigned threads) {
  std::vector<double> sums(records.size(), 0.0);
  std::vector<std::size_t> counts(records.size(), 0);
  parallel_for(records.size(), threads, [&](std::size_t begin, std::size_t end, unsigned) {
    std::vector<double> scores(scorer.num_entities());
    for (std::size_t i = begin; i < end; ++i) {
      const auto& rec = records[i];
      if (rec.final_answers.empty()) continue;
      scorer.score_all(rec.query, scores);
      const auto known = train.completions(rec.query);
      for (auto a : rec.final_answers) {
        sums[i] += 1.0 / static_cast<double>(rank_in_scores(scores, a, known));
      }
      counts[i] = rec.final_answers.size();
    }
  });
  MrrResult out;
  double total = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    total += sums[i];
    out.ranked += counts[i];
  }
  if (out.ranked == 0) throw Error(ErrorCode::InvalidArgument, "no valid facts to rank");
  out.mrr = total / static_cast<double>(out.ranked);
  return out;
}

std::vector<EntityId> response_set(std::span<const double> scores, double threshold,
                                   std::span<const EntityId> excluded) {
  std::vector<std::uint8_t> skip(scores.size(), 0);
  for (auto e : excluded) {
    if (e < skip.size()) skip[e] = 1;
  }
  std::vector<EntityId> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!skip[i] && scores[i] > threshold) out.push_back(static_cast<EntityId>(i));
  }
  return out;
}

std::vector<EntityId> response_set(const Scorer& scorer, const Query& q, double threshold,
                                   const TripleSet& train) {
  std::vector<double> scores(scorer.num_entities());
  scorer.score_all(q, scores);
  return response_set(scores, threshold, train.completions(q));
}

Confusion classification_counts(const AnswerRecord& record,
                                std::span<const EntityId> response) {
  const auto& gold = record.final_answers;
  std::size_t tp = 0;
  auto g = gold.begin();
  for (auto e : response) {
    while (g != gold.end() && *g < e) ++g;
    if (g != gold.end() && *g == e) ++tp;
  }
  return {tp, response.size() - tp, gold.size() - tp};
}

Prf micro_f1(const Scorer& scorer, std::span<const AnswerRecord> records,
             const ThresholdSet& thresholds, const TripleSet& train, Subset subset,
             unsigned threads) {
  check_thresholds(thresholds, scorer.num_threshold_rows());
  return Prf::from(
      subset_totals(scorer, records, thresholds, train, threads)[static_cast<int>(subset)]);
}

double grid_value(std::size_t k) { return static_cast<double>(k) / 10.0; }

std::vector<QueryProfile> profile_queries(const Scorer& scorer,
                                          std::span<const AnswerRecord> records,
                                          const TripleSet& train, unsigned threads) {
  std::vector<QueryProfile> out(records.size());
  parallel_for(records.size(), threads, [&](std::size_t begin, std::size_t end, unsigned) {
    const std::size_t n = scorer.num_entities();
    std::vector<double> scores(n);
    std::vector<std::uint8_t> cell(n);  // 0 = other, 1 = gold, 2 = excluded
    for (std::size_t i = begin; i < end; ++i) {
      const auto& rec = records[i];
      scorer.score_all(rec.query, scores);
      std::fill(cell.begin(), cell.end(), 0);
      for (auto e : train.completions(rec.query)) cell[e] = 2;
      for (auto e : rec.final_answers) cell[e] = 1;
      // hist[m]: entities exceeding exactly the first m grid values
      std::array<std::size_t, kGridSize + 1> gold_hist{}, other_hist{};
      for (std::size_t e = 0; e < n; ++e) {
        if (cell[e] == 2) continue;
        std::size_t m = 0;
        while (m < kGridSize && scores[e] > grid_value(m)) ++m;
        ++(cell[e] == 1 ? gold_hist : other_hist)[m];
      }
      auto& p = out[i];
      p.label = rec.label;
      p.row = scorer.threshold_row(rec.query);
      p.answers = rec.final_answers.size();
      std::size_t tp = 0, fp = 0;
      for (std::size_t k = kGridSize; k-- > 0;) {
        tp += gold_hist[k + 1];
        fp += other_hist[k + 1];
        p.tp[k] = tp;
        p.fp[k] = fp;
      }
    }
  });
  return out;
}

GlobalTuning tune_global_threshold(std::span<const QueryProfile> profiles) {
  if (profiles.empty()) throw Error(ErrorCode::InvalidArgument, "threshold tuning needs dev queries");
  GlobalTuning best{0.0, -1.0};
  for (std::size_t k = 0; k < kGridSize; ++k) {
    Confusion c;
    for (const auto& p : profiles) c += p.at(k);
    const double f1 = c.f1();
    if (f1 >= best.f1) best = {grid_value(k), f1};
  }
  return best;
}

RelationTuning tune_relation_thresholds(std::span<const QueryProfile> profiles,
                                        std::size_t num_rows, std::size_t iterations) {
  if (profiles.empty()) throw Error(ErrorCode::InvalidArgument, "threshold tuning needs dev queries");
  constexpr std::size_t kStart = 5;  // 0.5
  // contrib[row][k]: totals of the row's queries at grid threshold k
  std::vector<std::array<Confusion, kGridSize>> contrib(num_rows);
  for (const auto& p : profiles) {
    if (p.row >= num_rows) throw Error(ErrorCode::InvalidArgument, "query row out of range");
    for (std::size_t k = 0; k < kGridSize; ++k) contrib[p.row][k] += p.at(k);
  }
  std::vector<std::size_t> current(num_rows, kStart);
  Confusion total;
  for (std::size_t r = 0; r < num_rows; ++r) total += contrib[r][kStart];

  RelationTuning out;
  out.order = rows_present(profiles, num_rows);
  out.initial_f1 = total.f1();
  double best = 0.0;
  for (std::size_t it = 1; it <= iterations; ++it) {
    for (auto r : out.order) {
      for (auto k : kRelationGrid) {
        const auto& old_c = contrib[r][current[r]];
        const auto& new_c = contrib[r][k];
        Confusion trial{total.tp - old_c.tp + new_c.tp, total.fp - old_c.fp + new_c.fp,
                        total.fn - old_c.fn + new_c.fn};
        const double f1 = trial.f1();
        if (f1 > best) {
          best = f1;
          total = trial;
          current[r] = k;
          out.accepted.push_back({it, r, grid_value(k), f1});
        }
      }
    }
  }
  out.thresholds = ThresholdSet::uniform_rows(num_rows);
  for (std::size_t r = 0; r < num_rows; ++r) out.thresholds.per_row[r] = grid_value(current[r]);
  out.f1 = total.f1();
  return out;
}

EvalReport evaluate(const Scorer& scorer, const QueryDataset& ds, const EvalOptions& options) {
  if (scorer.num_entities() != ds.num_retained ||
      scorer.num_threshold_rows() != 2 * ds.relations.size()) {
    throw Error(ErrorCode::Mismatch, "model shape does not match the dataset (" +
                                         std::to_string(scorer.num_entities()) + " vs " +
                                         std::to_string(ds.num_retained) + " entities)");
  }
  if (!options.global && !options.per_relation) {
    throw Error(ErrorCode::InvalidArgument, "no threshold mode requested");
  }
  const std::size_t rows = scorer.num_threshold_rows();
  const auto& target = options.use_test ? ds.test : ds.dev;

  EvalReport report;
  report.split = options.use_test ? "test" : "dev";
  report.tuning_iterations = options.tuning_iterations;
  const auto ranked = mrr(scorer, target, ds.train, options.threads);
  report.mrr = ranked.mrr;
  report.ranked = ranked.ranked;

  const auto dev_profiles = profile_queries(scorer, ds.dev, ds.train, options.threads);
  std::vector<QueryProfile> target_profiles;
  if (options.use_test) target_profiles = profile_queries(scorer, target, ds.train, options.threads);
  const std::span<const QueryProfile> eval_profiles =
      options.use_test ? std::span<const QueryProfile>(target_profiles) : dev_profiles;
  const auto present = rows_present(dev_profiles, rows);

  auto finish = [&](ModeReport& m) {
    check_thresholds(m.thresholds, rows);
    std::array<Confusion, 4> totals, dev_totals;
    if (on_grid(m.thresholds)) {
      totals = profile_totals(eval_profiles, m.thresholds);
      dev_totals = profile_totals(dev_profiles, m.thresholds);
    } else {
      totals = subset_totals(scorer, target, m.thresholds, ds.train, options.threads);
      dev_totals = options.use_test
                       ? subset_totals(scorer, ds.dev, m.thresholds, ds.train, options.threads)
                       : totals;
    }
    for (auto s : kAllSubsets) m.subsets[static_cast<int>(s)] = Prf::from(totals[static_cast<int>(s)]);
    m.dev_f1 = dev_totals[static_cast<int>(Subset::Full)].f1();
    report.modes.push_back(std::move(m));
  };

  if (options.global) {
    ModeReport m;
    m.mode = ThresholdMode::Global;
    const double tau = options.fixed_global ? *options.fixed_global
                                            : tune_global_threshold(dev_profiles).threshold;
    m.thresholds = ThresholdSet::uniform_global(tau);
    m.stats = {tau, tau, tau, 1};
    finish(m);
  }
  if (options.per_relation) {
    ModeReport m;
    m.mode = ThresholdMode::PerRelation;
    if (options.fixed_per_row) {
      m.thresholds = {ThresholdMode::PerRelation, 0.5, *options.fixed_per_row};
    } else {
      auto tuned = tune_relation_thresholds(dev_profiles, rows, options.tuning_iterations);
      m.thresholds = std::move(tuned.thresholds);
      m.trace = std::move(tuned.accepted);
    }
    check_thresholds(m.thresholds, rows);
    m.stats = stats_over(m.thresholds.per_row, present);
    finish(m);
  }
  return report;
}

void check_compatible(const Checkpoint& ck, const QueryDataset& ds) {
  const auto& p = ck.params;
  if (p.num_entities != ds.num_retained || p.num_relations != ds.relations.size()) {
    throw Error(ErrorCode::Mismatch,
                "checkpoint has " + std::to_string(p.num_entities) + " entities and " +
                    std::to_string(p.num_relations) + " relations, dataset has " +
                    std::to_string(ds.num_retained) + " and " +
                    std::to_string(ds.relations.size()));
  }
  const auto& names = ds.entities.names();
  for (std::size_t i = 0; i < ds.num_retained; ++i) {
    if (ck.entities.name(static_cast<EntityId>(i)) != names[i]) {
      throw Error(ErrorCode::Mismatch, "entity " + std::to_string(i) + " differs: '" +
                                           ck.entities.name(static_cast<EntityId>(i)) +
                                           "' vs '" + names[i] + "'");
    }
  }
  if (!(ck.relations == ds.relations)) {
    throw Error(ErrorCode::Mismatch, "relation symbol tables differ");
  }
}

}  // namespace kbcq
