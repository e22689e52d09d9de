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

#include "kbcq/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_set>

#include "kbcq/common.hpp"

namespace kbcq {

namespace {

std::vector<bool> make_mask(std::size_t n, std::span<const EntityId> ids) {
  std::vector<bool> mask(n, false);
  for (auto e : ids) mask.at(e) = true;
  return mask;
}

// Visits every type-violating query anchored at a typed retained entity, in
// (direction, anchor, relation) order.
template <typename Visit>
void for_each_fake_candidate(const KnowledgeBase& kb,
                             const std::vector<bool>& removed,
                             const std::unordered_set<Query, QueryHash>& taken,
                             Visit&& visit) {
  const auto& ts = kb.types;
  const auto num_entities = static_cast<EntityId>(kb.entities.size());
  const auto num_relations = static_cast<RelationId>(kb.relations.size());
  for (Direction dir : {Direction::Tail, Direction::Head}) {
    for (EntityId e = 0; e < num_entities; ++e) {
      if (removed[e] || !ts.is_typed(e)) continue;
      for (RelationId r = 0; r < num_relations; ++r) {
        const auto required = dir == Direction::Tail ? ts.domain(r) : ts.range(r);
        if (!required || !ts.has_signature(r)) continue;
        if (ts.has_type(e, *required)) continue;
        const Query q{dir, e, r};
        if (taken.contains(q)) continue;
        visit(q);
      }
    }
  }
}

std::unordered_set<Query, QueryHash> query_set(
    std::span<const AnswerRecord> records) {
  std::unordered_set<Query, QueryHash> out;
  out.reserve(records.size());
  for (const auto& r : records) out.insert(r.query);
  return out;
}

std::string percent(double v) {
  std::ostringstream os;
  os.precision(1);
  os << std::fixed << v * 100.0 << "%";
  return os.str();
}

}  // namespace

char label_char(Label l) {
  switch (l) {
    case Label::C: return 'C';
    case Label::I: return 'I';
    case Label::N: return 'N';
    case Label::F: return 'F';
  }
  return '?';
}

Label parse_label(char c) {
  switch (c) {
    case 'C': return Label::C;
    case 'I': return Label::I;
    case 'N': return Label::N;
    case 'F': return Label::F;
    default:
      throw Error(ErrorCode::Parse, std::string("unknown query label '") + c + "'");
  }
}

SplitTargets SplitTargets::normalized() const {
  if (empty_removed < 0 || answered < 0 || fake < 0) {
    throw Error(ErrorCode::Parameter, "split targets must be non-negative");
  }
  const double sum = empty_removed + answered + fake;
  if (!(sum > 0)) throw Error(ErrorCode::Parameter, "split targets sum to zero");
  return {empty_removed / sum, answered / sum, fake / sum};
}

std::size_t LabelCounts::pool() const {
  return total(Label::C) + total(Label::I) + total(Label::N) + total(Label::F);
}

void LabelCounts::add(const AnswerRecord& r) {
  ++cells[static_cast<int>(r.label)][static_cast<int>(r.query.direction)];
}

LabelCounts& LabelCounts::operator+=(const LabelCounts& o) {
  for (int l = 0; l < 4; ++l) {
    for (int d = 0; d < 2; ++d) cells[l][d] += o.cells[l][d];
  }
  return *this;
}

LabelCounts count_labels(std::span<const AnswerRecord> records) {
  LabelCounts c;
  for (const auto& r : records) c.add(r);
  return c;
}

std::vector<EntityId> select_removal_set(const KnowledgeBase& kb, std::size_t n,
                                         std::uint64_t seed) {
  const std::size_t total = kb.entities.size();
  if (n >= total && !(n == 0 && total == 0)) {
    throw Error(ErrorCode::Parameter,
                "cannot remove " + std::to_string(n) + " of " +
                    std::to_string(total) + " entities");
  }
  std::vector<EntityId> ids(total);
  for (std::size_t i = 0; i < total; ++i) ids[i] = static_cast<EntityId>(i);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::swap(ids[i], ids[i + rng.below(total - i)]);
  }
  ids.resize(n);
  std::sort(ids.begin(), ids.end());
  return ids;
}

TrainSplit split_train(const KnowledgeBase& kb,
                       std::span<const EntityId> removed) {
  const auto mask = make_mask(kb.entities.size(), removed);
  TrainSplit out;
  auto both_removed = [&](const Triple& t) { return mask[t.head] && mask[t.tail]; };
  for (const TripleSet* part : {&kb.valid, &kb.test}) {
    for (const auto& t : *part) {
      if (!both_removed(t)) out.held_out.insert(t);
    }
  }
  for (const auto& t : kb.train) {
    if (both_removed(t)) continue;
    if (mask[t.head] || mask[t.tail]) {
      out.held_out.insert(t);
    } else {
      out.train.insert(t);
    }
  }
  return out;
}

std::vector<AnswerRecord> group_queries(const TripleSet& held_out,
                                        std::size_t num_entities,
                                        std::span<const EntityId> removed) {
  const auto mask = make_mask(num_entities, removed);
  std::map<Query, std::vector<EntityId>> groups;
  for (const auto& t : held_out) {
    if (!mask.at(t.head)) groups[{Direction::Tail, t.head, t.relation}].push_back(t.tail);
    if (!mask.at(t.tail)) groups[{Direction::Head, t.tail, t.relation}].push_back(t.head);
  }
  std::vector<AnswerRecord> out;
  out.reserve(groups.size());
  for (auto& [q, answers] : groups) {
    std::sort(answers.begin(), answers.end());
    answers.erase(std::unique(answers.begin(), answers.end()), answers.end());
    AnswerRecord rec;
    rec.query = q;
    rec.pre_removal_answers = answers;
    rec.final_answers = std::move(answers);
    rec.label = Label::C;
    out.push_back(std::move(rec));
  }
  return out;
}

void prune_answers(std::vector<AnswerRecord>& records,
                   std::span<const EntityId> removed) {
  std::unordered_set<EntityId> gone(removed.begin(), removed.end());
  for (auto& rec : records) {
    rec.final_answers.clear();
    for (auto e : rec.pre_removal_answers) {
      if (!gone.contains(e)) rec.final_answers.push_back(e);
    }
    if (rec.final_answers.size() == rec.pre_removal_answers.size()) {
      rec.label = Label::C;
    } else if (rec.final_answers.empty()) {
      rec.label = Label::N;
    } else {
      rec.label = Label::I;
    }
  }
}

std::size_t count_fake_candidates(const KnowledgeBase& kb,
                                  std::span<const EntityId> removed,
                                  std::span<const AnswerRecord> answerable) {
  const auto mask = make_mask(kb.entities.size(), removed);
  const auto taken = query_set(answerable);
  std::size_t n = 0;
  for_each_fake_candidate(kb, mask, taken, [&](const Query&) { ++n; });
  return n;
}

std::vector<AnswerRecord> generate_fake_queries(
    const KnowledgeBase& kb, std::span<const EntityId> removed,
    std::span<const AnswerRecord> answerable, std::size_t count,
    std::uint64_t seed) {
  if (count == 0) return {};
  const std::size_t available = count_fake_candidates(kb, removed, answerable);
  if (count > available) {
    throw Error(ErrorCode::Parameter,
                "requested " + std::to_string(count) +
                    " type-violating queries but at most " +
                    std::to_string(available) + " are available");
  }
  const auto mask = make_mask(kb.entities.size(), removed);
  const auto taken = query_set(answerable);

  // Selection sampling: a uniform subset of the candidate sequence, kept in
  // enumeration order.
  Rng rng(seed);
  std::size_t needed = count;
  std::size_t remaining = available;
  std::vector<AnswerRecord> out;
  out.reserve(count);
  for_each_fake_candidate(kb, mask, taken, [&](const Query& q) {
    if (needed > 0 && rng.below(remaining) < needed) {
      AnswerRecord rec;
      rec.query = q;
      rec.label = Label::F;
      out.push_back(std::move(rec));
      --needed;
    }
    --remaining;
  });
  return out;
}

std::size_t fake_query_count(const SplitTargets& targets, std::size_t answered,
                             std::size_t empty_removed) {
  const SplitTargets t = targets.normalized();
  if (t.fake <= 0) return 0;
  double wanted = 0;
  if (t.answered > 0) {
    const double pool = static_cast<double>(answered) / t.answered;
    wanted = std::round(pool * (t.empty_removed + t.fake)) -
             static_cast<double>(empty_removed);
  } else if (t.empty_removed > 0) {
    wanted = std::round(static_cast<double>(empty_removed) * t.fake / t.empty_removed);
  }
  return wanted > 0 ? static_cast<std::size_t>(wanted) : 0;
}

EvaluationSplit balance_and_split(std::vector<AnswerRecord> records,
                                  std::vector<AnswerRecord> fakes,
                                  const SplitTargets& targets,
                                  std::uint64_t seed,
                                  std::vector<std::string>* warnings) {
  std::vector<AnswerRecord> pool = std::move(records);
  pool.insert(pool.end(), std::make_move_iterator(fakes.begin()),
              std::make_move_iterator(fakes.end()));

  const LabelCounts counts = count_labels(pool);
  const double total = static_cast<double>(counts.pool());
  if (warnings && total > 0) {
    const SplitTargets t = targets.normalized();
    const double n_frac = counts.total(Label::N) / total;
    const double f_frac = counts.total(Label::F) / total;
    const double a_frac = 1.0 - n_frac - f_frac;
    constexpr double kTolerance = 0.05;
    if (std::abs(n_frac - t.empty_removed) > kTolerance ||
        std::abs(a_frac - t.answered) > kTolerance ||
        std::abs(f_frac - t.fake) > kTolerance) {
      warnings->push_back("split targets not reached: achieved N " +
                          percent(n_frac) + " / answered " + percent(a_frac) +
                          " / F " + percent(f_frac) + " (targets " +
                          percent(t.empty_removed) + " / " + percent(t.answered) +
                          " / " + percent(t.fake) + ")");
    }
  }

  std::array<std::vector<std::size_t>, 4> by_label;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    by_label[static_cast<int>(pool[i].label)].push_back(i);
  }
  Rng rng(seed);
  std::vector<std::size_t> dev_idx;
  std::vector<std::size_t> test_idx;
  for (auto& group : by_label) {
    rng.shuffle(group);
    for (std::size_t k = 0; k < group.size(); ++k) {
      (k % 2 == 0 ? dev_idx : test_idx).push_back(group[k]);
    }
  }
  std::sort(dev_idx.begin(), dev_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  EvaluationSplit out;
  out.dev.reserve(dev_idx.size());
  out.test.reserve(test_idx.size());
  for (auto i : dev_idx) out.dev.push_back(std::move(pool[i]));
  for (auto i : test_idx) out.test.push_back(std::move(pool[i]));
  return out;
}

QueryDataset build_dataset(const KnowledgeBase& kb, const BuildOptions& options) {
  const SplitTargets targets = options.targets.normalized();
  if (targets.fake > 0 && !kb.has_types()) {
    throw Error(ErrorCode::Parameter,
                "type-violating (F) queries require entity types and relation "
                "signatures; load a type system or set the fake fraction to 0");
  }

  QueryDataset ds;
  ds.options = options;

  const auto removed = select_removal_set(kb, options.remove_n, options.removal_seed);
  TrainSplit split = split_train(kb, removed);
  auto records = group_queries(split.held_out, kb.entities.size(), removed);
  prune_answers(records, removed);

  const LabelCounts counts = count_labels(records);
  const std::size_t empty_removed = counts.total(Label::N);
  const std::size_t answered = counts.pool() - empty_removed;
  std::size_t fake_count = fake_query_count(targets, answered, empty_removed);
  if (fake_count > 0) {
    const std::size_t available = count_fake_candidates(kb, removed, records);
    if (fake_count > available) {
      ds.warnings.push_back("only " + std::to_string(available) +
                            " type-violating queries available, wanted " +
                            std::to_string(fake_count));
      fake_count = available;
    }
  }
  auto fakes = generate_fake_queries(kb, removed, records, fake_count, options.fake_seed);
  auto eval = balance_and_split(std::move(records), std::move(fakes), targets,
                                options.split_seed, &ds.warnings);

  // Re-intern: retained entities first, in knowledge-base order.
  const auto mask = make_mask(kb.entities.size(), removed);
  std::vector<EntityId> remap(kb.entities.size());
  for (EntityId e = 0; e < kb.entities.size(); ++e) {
    if (!mask[e]) remap[e] = ds.entities.intern(kb.entities.name(e));
  }
  ds.num_retained = ds.entities.size();
  for (auto e : removed) remap[e] = ds.entities.intern(kb.entities.name(e));
  for (const auto& name : kb.relations.names()) ds.relations.intern(name);

  for (const auto& t : split.train) {
    ds.train.insert({remap[t.head], t.relation, remap[t.tail]});
  }
  auto convert = [&](std::vector<AnswerRecord>& recs) {
    for (auto& rec : recs) {
      rec.query.anchor = remap[rec.query.anchor];
      for (auto& e : rec.pre_removal_answers) e = remap[e];
      for (auto& e : rec.final_answers) e = remap[e];
      std::sort(rec.pre_removal_answers.begin(), rec.pre_removal_answers.end());
      std::sort(rec.final_answers.begin(), rec.final_answers.end());
    }
  };
  convert(eval.dev);
  convert(eval.test);
  ds.dev = std::move(eval.dev);
  ds.test = std::move(eval.test);
  return ds;
}

}  // namespace kbcq
