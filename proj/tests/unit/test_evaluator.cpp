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

#include <gtest/gtest.h>

#include <json.hpp>

#include "fixtures.hpp"
#include "kbcq/evaluator.hpp"

namespace kbcq {
namespace {

using testing::OracleScorer;

/// Explicit score vectors per query; unknown queries score 0.
class TableScorer final : public Scorer {
 public:
  TableScorer(std::size_t entities, std::size_t relations)
      : entities_(entities), relations_(relations) {}
  void set(const Query& q, std::vector<double> s) { table_[q] = std::move(s); }
  std::size_t num_entities() const override { return entities_; }
  std::size_t num_threshold_rows() const override { return 2 * relations_; }
  RelationId threshold_row(const Query& q) const override {
    return q.direction == Direction::Head ? q.relation + static_cast<RelationId>(relations_)
                                          : q.relation;
  }
  void score_all(const Query& q, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    if (auto it = table_.find(q); it != table_.end()) std::copy(it->second.begin(), it->second.end(), out.begin());
  }

 private:
  std::size_t entities_, relations_;
  std::map<Query, std::vector<double>> table_;
};

AnswerRecord record(Query q, std::vector<EntityId> answers, Label label = Label::C) {
  AnswerRecord r;
  r.query = q;
  r.pre_removal_answers = answers;
  r.final_answers = std::move(answers);
  r.label = label;
  return r;
}

QueryDataset twenty_entity_dataset(std::uint64_t seed) {
  const auto kb = testing::random_kb(20, 3, 120, seed, 0.35);
  BuildOptions o;
  o.remove_n = 0;
  o.targets = {0, 1, 0};
  return build_dataset(kb, o);
}

TEST(Subsets, Membership) {
  EXPECT_TRUE(in_subset(Label::N, Subset::I));
  EXPECT_TRUE(in_subset(Label::I, Subset::I));
  EXPECT_FALSE(in_subset(Label::F, Subset::I));
  EXPECT_TRUE(in_subset(Label::F, Subset::CF));
  EXPECT_TRUE(in_subset(Label::C, Subset::CF));
  EXPECT_FALSE(in_subset(Label::N, Subset::C));
  for (auto l : {Label::C, Label::I, Label::N, Label::F}) EXPECT_TRUE(in_subset(l, Subset::Full));
}

TEST(RankTriples, Reconstruction) {
  std::vector<AnswerRecord> recs{record({Direction::Tail, 1, 0}, {2, 3}),
                                 record({Direction::Head, 2, 0}, {1}),
                                 record({Direction::Tail, 4, 0}, {}, Label::N)};
  const auto set = reconstruct_rank_triples(recs);
  EXPECT_EQ(set.size(), 2u);  // (1,0,2) appears in both directions
  EXPECT_TRUE(set.contains({1, 0, 2}));
  EXPECT_TRUE(set.contains({1, 0, 3}));
  EXPECT_TRUE(reconstruct_rank_triples(std::vector<AnswerRecord>{recs[2]}).empty());
}

TEST(RankTriples, SizeIsTheSetUnion) {
  const auto ds = twenty_entity_dataset(3);
  std::set<Triple> oracle;
  for (const auto& r : ds.test) {
    for (auto a : r.final_answers) oracle.insert(r.query.complete(a));
  }
  EXPECT_EQ(reconstruct_rank_triples(ds.test).size(), oracle.size());
}

TEST(Rank, UniqueTiedAndExcluded) {
  const std::vector<double> s{0.9, 0.5, 0.5, 0.95, 0.1};
  EXPECT_EQ(rank_in_scores(s, 3, {}), 1u);
  EXPECT_EQ(rank_in_scores(s, 1, {}), 4u);  // pessimistic: tie with 2 counts
  const std::vector<EntityId> excl{2, 3};
  EXPECT_EQ(rank_in_scores(s, 1, excl), 2u);
  const std::vector<EntityId> self{1};
  EXPECT_EQ(rank_in_scores(s, 1, self), 4u);  // the target itself is never excluded
}

TEST(Rank, AgreesWithFullSortReference) {
  const auto ds = twenty_entity_dataset(4);
  for (auto kind : {ModelKind::TransE, ModelKind::ComplEx}) {
    auto p = init_params(kind, 4, ds.num_retained, ds.relations.size(), 2);
    const ModelScorer scorer(p);
    for (const auto& t : ds.train) {
      for (auto dir : {Direction::Tail, Direction::Head}) {
        const Query q = dir == Direction::Tail ? Query{dir, t.head, t.relation}
                                               : Query{dir, t.tail, t.relation};
        const EntityId target = dir == Direction::Tail ? t.tail : t.head;
        EXPECT_EQ(rank(scorer, t, dir, ds.train), testing::reference_rank(p, q, target, ds.train));
      }
    }
  }
}

TEST(Mrr, Arithmetic) {
  TableScorer s(5, 1);
  s.set({Direction::Tail, 0, 0}, {0, 0.9, 0.8, 0.7, 0.95});
  std::vector<AnswerRecord> recs{record({Direction::Tail, 0, 0}, {1}),
                                 record({Direction::Head, 1, 0}, {}, Label::N)};
  EXPECT_DOUBLE_EQ(mrr(s, recs, {}).mrr, 0.5);  // the empty query is ignored
  // ranks 1 and 4 -> 0.625
  s.set({Direction::Tail, 0, 0}, {0.6, 0.9, 0.8, 0.7, 0.1});
  std::vector<AnswerRecord> two{record({Direction::Tail, 0, 0}, {0, 1})};
  TripleSet train;
  train.insert({0, 0, 2});
  train.insert({0, 0, 3});
  const auto r = mrr(s, two, train);
  EXPECT_EQ(r.ranked, 2u);
  // answer 1 ranks first; answer 0 loses to 1 and 4's 0.1 is below it
  EXPECT_DOUBLE_EQ(r.mrr, (1.0 + 1.0 / 2.0) / 2.0);
  s.set({Direction::Tail, 0, 0}, {0.35, 0.9, 0.8, 0.7, 0.3});
  EXPECT_DOUBLE_EQ(mrr(s, two, {}).mrr, 0.625);
  EXPECT_DOUBLE_EQ(mrr(s, std::vector<AnswerRecord>{record({Direction::Tail, 0, 0}, {1})}, {}).mrr,
                   1.0);
}

TEST(Mrr, NothingToRankIsAnError) {
  TableScorer s(3, 1);
  std::vector<AnswerRecord> recs{record({Direction::Tail, 0, 0}, {}, Label::F)};
  try {
    mrr(s, recs, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
    EXPECT_NE(std::string(e.what()).find("no valid facts"), std::string::npos);
  }
}

TEST(Mrr, MatchesReferenceAndIsThreadInvariant) {
  const auto ds = twenty_entity_dataset(5);
  auto p = init_params(ModelKind::DistMult, 6, ds.num_retained, ds.relations.size(), 7);
  const ModelScorer scorer(p);
  const double ref = testing::reference_mrr(p, ds.test, ds.train);
  EXPECT_NEAR(mrr(scorer, ds.test, ds.train).mrr, ref, 1e-12);
  EXPECT_EQ(mrr(scorer, ds.test, ds.train, 1).mrr, mrr(scorer, ds.test, ds.train, 5).mrr);
}

TEST(ResponseSet, ThresholdFilter) {
  const std::vector<double> s{0.9, 0.4, 0.6};
  EXPECT_EQ(response_set(s, 0.5, {}), (std::vector<EntityId>{0, 2}));
  const std::vector<double> zeros(4, 0.0);
  EXPECT_TRUE(response_set(zeros, 0.0, {}).empty());
  const std::vector<double> ones(4, 1.0);
  EXPECT_TRUE(response_set(ones, 1.0, {}).empty());
  const std::vector<EntityId> excl{0};
  EXPECT_EQ(response_set(s, 0.5, excl), (std::vector<EntityId>{2}));
}

TEST(ResponseSet, SigmoidHeadAtThresholdOneIsEmpty) {
  auto p = init_params(ModelKind::DistMult, 2, 3, 1, 0);
  p.entity.fill(10);
  p.relation.fill(10);
  const ModelScorer scorer(p);
  EXPECT_TRUE(response_set(scorer, {Direction::Tail, 0, 0}, 1.0, TripleSet{}).empty());
  EXPECT_EQ(response_set(scorer, {Direction::Tail, 0, 0}, 0.9, TripleSet{}).size(), 3u);
}

TEST(ResponseSet, TrainCompletionsAreNeverPredicted) {
  const auto ds = twenty_entity_dataset(6);
  struct One final : Scorer {
    std::size_t n, r;
    std::size_t num_entities() const override { return n; }
    std::size_t num_threshold_rows() const override { return 2 * r; }
    RelationId threshold_row(const Query& q) const override { return q.relation; }
    void score_all(const Query&, std::span<double> out) const override {
      std::fill(out.begin(), out.end(), 1.0);
    }
  } one;
  one.n = ds.num_retained;
  one.r = ds.relations.size();
  for (const auto& rec : ds.test) {
    for (auto e : response_set(one, rec.query, 0.5, ds.train)) {
      EXPECT_FALSE(ds.train.contains(rec.query.complete(e)));
    }
  }
}

TEST(ClassificationCounts, SetArithmetic) {
  // R = {a, b, c}, A = {b, d}
  const auto rec = record({Direction::Tail, 9, 0}, {1, 3});
  const std::vector<EntityId> response{0, 1, 2};
  EXPECT_EQ(classification_counts(rec, response), (Confusion{1, 2, 1}));
  const auto empty = record({Direction::Tail, 9, 0}, {}, Label::N);
  EXPECT_EQ(classification_counts(empty, {}), (Confusion{0, 0, 0}));
  const std::vector<EntityId> x{4};
  EXPECT_EQ(classification_counts(empty, x), (Confusion{0, 1, 0}));
}

TEST(Confusion, PrecisionRecallF1) {
  const Confusion c{1, 2, 1};
  EXPECT_DOUBLE_EQ(c.precision(), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(c.recall(), 0.5);
  EXPECT_NEAR(c.f1(), 0.4, 1e-15);
  EXPECT_EQ(Confusion{}.f1(), 0.0);
  EXPECT_EQ((Confusion{0, 3, 0}).precision(), 0.0);
}

TEST(MicroF1, PerfectPredictorOnCompleteQueries) {
  const auto ds = twenty_entity_dataset(7);
  const OracleScorer oracle(ds.num_retained, ds.relations.size(), {ds.dev, ds.test});
  for (double tau : {0.0, 0.5, 0.9}) {
    const auto prf = micro_f1(oracle, ds.test, ThresholdSet::uniform_global(tau), ds.train, Subset::Full);
    EXPECT_EQ(prf.f1, 1.0);
    EXPECT_EQ(prf.totals.fp, 0u);
  }
  EXPECT_EQ(micro_f1(oracle, ds.test, ThresholdSet::uniform_global(1.0), ds.train, Subset::Full).f1, 0.0);
}

TEST(MicroF1, MatchesPerCellReference) {
  const auto ds = twenty_entity_dataset(8);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto p = init_params(seed % 2 ? ModelKind::Region : ModelKind::DistMult, 4, ds.num_retained,
                         ds.relations.size(), seed);
    const ModelScorer scorer(p);
    auto rows = ThresholdSet::uniform_rows(2 * ds.relations.size());
    for (std::size_t r = 0; r < rows.per_row.size(); ++r) rows.per_row[r] = 0.05 + 0.13 * r;
    for (const auto& th : {ThresholdSet::uniform_global(0.3), rows}) {
      for (auto s : kAllSubsets) {
        const auto got = micro_f1(scorer, ds.test, th, ds.train, s);
        const auto ref = testing::reference_confusion(p, ds.test, th, ds.train, s);
        EXPECT_EQ(got.totals, ref);
        EXPECT_NEAR(got.f1, ref.f1(), 1e-12);
      }
    }
  }
}

TEST(MicroF1, AdditiveOverRecords) {
  const auto ds = twenty_entity_dataset(9);
  auto p = init_params(ModelKind::DistMult, 4, ds.num_retained, ds.relations.size(), 1);
  const ModelScorer scorer(p);
  const auto th = ThresholdSet::uniform_global(0.5);
  const std::span<const AnswerRecord> all(ds.test);
  const auto half = all.size() / 2;
  auto whole = micro_f1(scorer, all, th, ds.train, Subset::Full).totals;
  auto a = micro_f1(scorer, all.first(half), th, ds.train, Subset::Full).totals;
  a += micro_f1(scorer, all.subspan(half), th, ds.train, Subset::Full).totals;
  EXPECT_EQ(whole, a);
}

TEST(MicroF1, InvariantUnderMonotoneScoreMaps) {
  const auto ds = twenty_entity_dataset(10);
  auto p = init_params(ModelKind::ComplEx, 4, ds.num_retained, ds.relations.size(), 3);
  const ModelScorer scorer(p);
  const testing::CubedScorer cubed(scorer);
  EXPECT_EQ(mrr(scorer, ds.test, ds.train).mrr, mrr(cubed, ds.test, ds.train).mrr);
  for (double tau : {0.35, 0.5, 0.55}) {
    const auto a = micro_f1(scorer, ds.test, ThresholdSet::uniform_global(tau), ds.train, Subset::Full);
    const auto b =
        micro_f1(cubed, ds.test, ThresholdSet::uniform_global(tau * tau * tau), ds.train, Subset::Full);
    EXPECT_EQ(a.totals, b.totals);
  }
}

TEST(MicroF1, RejectsBadThresholds) {
  TableScorer s(3, 1);
  std::vector<AnswerRecord> recs{record({Direction::Tail, 0, 0}, {1})};
  EXPECT_THROW(micro_f1(s, recs, ThresholdSet::uniform_global(1.5), {}, Subset::Full), Error);
  EXPECT_THROW(micro_f1(s, recs, ThresholdSet::uniform_rows(1), {}, Subset::Full), Error);
}

TEST(Grid, Values) {
  EXPECT_EQ(grid_value(3), 0.3);
  EXPECT_EQ(grid_value(0), 0.0);
  EXPECT_EQ(grid_value(10), 1.0);
  for (auto k : kRelationGrid) EXPECT_LT(k, kGridSize);
}

TEST(Profiles, MatchDirectCountsAtEveryGridPoint) {
  const auto ds = twenty_entity_dataset(11);
  auto p = init_params(ModelKind::DistMult, 4, ds.num_retained, ds.relations.size(), 5);
  const ModelScorer scorer(p);
  const auto profiles = profile_queries(scorer, ds.dev, ds.train);
  ASSERT_EQ(profiles.size(), ds.dev.size());
  for (std::size_t k = 0; k < kGridSize; ++k) {
    Confusion from_profiles;
    for (const auto& q : profiles) from_profiles += q.at(k);
    const auto direct =
        micro_f1(scorer, ds.dev, ThresholdSet::uniform_global(grid_value(k)), ds.train, Subset::Full);
    EXPECT_EQ(from_profiles, direct.totals) << k;
  }
}

QueryProfile profile(RelationId row, std::size_t answers, std::array<std::size_t, kGridSize> tp,
                     std::array<std::size_t, kGridSize> fp, Label label = Label::C) {
  QueryProfile p;
  p.label = label;
  p.row = row;
  p.answers = answers;
  p.tp = tp;
  p.fp = fp;
  return p;
}

TEST(GlobalTuning, TiesGoToLargerThreshold) {
  // Every entity scores 1 on an all-empty dev set: F1 is 0 everywhere.
  std::vector<QueryProfile> all_empty{
      profile(0, 0, {}, {5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 0}, Label::N)};
  const auto t = tune_global_threshold(all_empty);
  EXPECT_EQ(t.threshold, 1.0);
  EXPECT_EQ(t.f1, 0.0);
  EXPECT_THROW(tune_global_threshold({}), Error);
}

TEST(GlobalTuning, PicksTheBestGridPoint) {
  std::vector<QueryProfile> ps{profile(0, 2, {2, 2, 2, 2, 1, 1, 1, 0, 0, 0, 0},
                                       {9, 6, 3, 0, 0, 0, 0, 0, 0, 0, 0})};
  const auto t = tune_global_threshold(ps);
  EXPECT_EQ(t.threshold, 0.3);
  EXPECT_EQ(t.f1, 1.0);
}

TEST(RelationTuning, SingleRowIsASevenPointSweep) {
  std::vector<QueryProfile> ps{profile(1, 3, {3, 3, 3, 3, 2, 2, 2, 1, 1, 1, 0},
                                       {8, 7, 1, 1, 0, 0, 0, 0, 0, 0, 0}),
                               profile(1, 1, {1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0},
                                       {4, 4, 4, 0, 0, 0, 0, 0, 0, 0, 0})};
  const auto t = tune_relation_thresholds(ps, 4, 2);
  double best = 0;
  std::size_t best_k = 0;
  for (auto k : kRelationGrid) {
    Confusion c;
    for (const auto& p : ps) c += p.at(k);
    if (c.f1() > best) {
      best = c.f1();
      best_k = k;
    }
  }
  EXPECT_EQ(t.f1, best);
  EXPECT_EQ(t.thresholds.per_row[1], grid_value(best_k));
  EXPECT_EQ(t.order, (std::vector<RelationId>{1}));
  for (auto r : {0u, 2u, 3u}) EXPECT_EQ(t.thresholds.per_row[r], 0.5);
}

TEST(RelationTuning, AcceptedStepsStrictlyIncrease) {
  const auto ds = twenty_entity_dataset(12);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto p = init_params(ModelKind::TransE, 4, ds.num_retained, ds.relations.size(), seed);
    const ModelScorer scorer(p);
    const auto profiles = profile_queries(scorer, ds.dev, ds.train);
    const auto t = tune_relation_thresholds(profiles, scorer.num_threshold_rows(), 2);
    double prev = 0;
    for (const auto& step : t.accepted) {
      EXPECT_GT(step.f1, prev);
      prev = step.f1;
    }
    EXPECT_GE(t.f1, t.initial_f1);
    // The reported F1 is the F1 of the returned thresholds.
    EXPECT_NEAR(micro_f1(scorer, ds.dev, t.thresholds, ds.train, Subset::Full).f1, t.f1, 1e-15);
  }
}

TEST(RelationTuning, OrderIsByDevFrequency) {
  std::vector<QueryProfile> ps{profile(2, 1, {}, {}), profile(0, 1, {}, {}), profile(2, 1, {}, {}),
                               profile(3, 1, {}, {}), profile(0, 1, {}, {})};
  const auto t = tune_relation_thresholds(ps, 4, 1);
  EXPECT_EQ(t.order, (std::vector<RelationId>{0, 2, 3}));
}

TEST(Evaluate, OracleScoresPerfectly) {
  const auto ds = twenty_entity_dataset(13);
  const OracleScorer oracle(ds.num_retained, ds.relations.size(), {ds.dev, ds.test});
  const auto rep = evaluate(oracle, ds, EvalOptions{});
  ASSERT_EQ(rep.modes.size(), 2u);
  for (const auto& m : rep.modes) {
    EXPECT_EQ(m.subsets[static_cast<int>(Subset::Full)].f1, 1.0);
    EXPECT_EQ(m.dev_f1, 1.0);
  }
  EXPECT_EQ(rep.split, "test");
}

TEST(Evaluate, ThreadInvariantAndConsistentWithDirectMetrics) {
  const auto ds = twenty_entity_dataset(14);
  auto p = init_params(ModelKind::DistMult, 4, ds.num_retained, ds.relations.size(), 2);
  const ModelScorer scorer(p);
  EvalOptions one, four;
  four.threads = 4;
  const auto a = evaluate(scorer, ds, one);
  const auto b = evaluate(scorer, ds, four);
  EXPECT_EQ(report_to_json(a, ds), report_to_json(b, ds));
  for (const auto& m : a.modes) {
    for (auto s : kAllSubsets) {
      EXPECT_EQ(m.subsets[static_cast<int>(s)].totals,
                micro_f1(scorer, ds.test, m.thresholds, ds.train, s).totals);
    }
  }
  EXPECT_EQ(a.mrr, mrr(scorer, ds.test, ds.train).mrr);
}

TEST(Evaluate, PerRelationDevF1AtLeastGlobalOnTheseRuns) {
  const auto ds = twenty_entity_dataset(15);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto p = init_params(ModelKind::ComplEx, 4, ds.num_retained, ds.relations.size(), seed);
    const ModelScorer scorer(p);
    EvalOptions o;
    o.use_test = false;
    const auto rep = evaluate(scorer, ds, o);
    EXPECT_EQ(rep.split, "dev");
    EXPECT_GE(rep.modes[1].dev_f1, rep.modes[0].dev_f1);
  }
}

TEST(Evaluate, FixedOffGridThresholdsUseDirectScoring) {
  const auto ds = twenty_entity_dataset(16);
  auto p = init_params(ModelKind::DistMult, 4, ds.num_retained, ds.relations.size(), 9);
  const ModelScorer scorer(p);
  EvalOptions o;
  o.fixed_global = 0.437;
  o.fixed_per_row = std::vector<double>(scorer.num_threshold_rows(), 0.512);
  const auto rep = evaluate(scorer, ds, o);
  EXPECT_EQ(rep.modes[0].subsets[0].totals,
            micro_f1(scorer, ds.test, ThresholdSet::uniform_global(0.437), ds.train, Subset::Full).totals);
  EXPECT_EQ(rep.modes[1].stats.mean, 0.512);
  o.fixed_global = -0.1;
  EXPECT_THROW(evaluate(scorer, ds, o), Error);
}

TEST(Evaluate, ShapeMismatchAndCheckpointCompatibility) {
  const auto ds = twenty_entity_dataset(17);
  auto p = init_params(ModelKind::DistMult, 4, ds.num_retained + 1, ds.relations.size(), 9);
  const ModelScorer scorer(p);
  try {
    evaluate(scorer, ds, EvalOptions{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Mismatch);
  }
  Checkpoint ck;
  ck.params = init_params(ModelKind::DistMult, 4, ds.num_retained, ds.relations.size(), 9);
  for (EntityId e = 0; e < ds.num_retained; ++e) ck.entities.intern(ds.entities.name(e));
  ck.relations = ds.relations;
  EXPECT_NO_THROW(check_compatible(ck, ds));
  ck.relations = SymbolTable{};
  for (std::size_t r = 0; r < ds.relations.size(); ++r) ck.relations.intern("x" + std::to_string(r));
  EXPECT_THROW(check_compatible(ck, ds), Error);
}

TEST(Report, JsonAndTsvLayout) {
  const auto ds = twenty_entity_dataset(18);
  auto p = init_params(ModelKind::TransE, 4, ds.num_retained, ds.relations.size(), 1);
  const ModelScorer scorer(p);
  auto rep = evaluate(scorer, ds, EvalOptions{});
  rep.model = "transe";
  rep.dim = 4;
  const auto j = nlohmann::json::parse(report_to_json(rep, ds));
  EXPECT_EQ(j["format"], "kbcq-report");
  EXPECT_EQ(j["modes"].size(), 2u);
  EXPECT_EQ(j["modes"][0]["mode"], "global");
  EXPECT_EQ(j["modes"][1]["thresholds"].size(), 2 * ds.relations.size());
  EXPECT_EQ(j["modes"][0]["subsets"].size(), 4u);
  EXPECT_EQ(j["grids"]["per_relation"].size(), 7u);
  const auto tsv = report_to_tsv(rep);
  const auto nl = tsv.find('\n');
  const auto header = tsv.substr(0, nl), row = tsv.substr(nl + 1);
  EXPECT_EQ(std::count(header.begin(), header.end(), '\t'), std::count(row.begin(), row.end(), '\t'));
  EXPECT_NE(header.find("multi_full_f1"), std::string::npos);
  EXPECT_NE(header.find("global_CF_precision"), std::string::npos);
  EXPECT_EQ(row.rfind("transe\t4\ttest\t", 0), 0u);
}

}  // namespace
}  // namespace kbcq
