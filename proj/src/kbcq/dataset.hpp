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

// Query-answer evaluation dataset construction by controlled entity removal.
//
// Pipeline: select removed entities -> re-split train/held-out -> group the
// held-out triples into head and tail queries -> prune removed entities from
// the answer sets (labels C/I/N) -> synthesize type-violating queries (F) ->
// stratified dev/test split.
//
// The builder operates in knowledge-base entity ids. build_dataset() then
// re-interns entities so that retained entities occupy [0, |E+|) and removed
// entities follow; models only ever see the retained prefix.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kbcq/kb.hpp"

namespace kbcq {

enum class Label : std::uint8_t { C = 0, I = 1, N = 2, F = 3 };

char label_char(Label l);
Label parse_label(char c);

struct AnswerRecord {
  Query query;
  std::vector<EntityId> pre_removal_answers;  // sorted
  std::vector<EntityId> final_answers;        // sorted, subset of the above
  Label label = Label::C;

  bool operator==(const AnswerRecord&) const = default;
};

/// Desired composition of the evaluation pool. Values are normalized to sum
/// to one before use.
struct SplitTargets {
  double empty_removed = 0.25;  // N
  double answered = 0.50;       // C plus non-empty I
  double fake = 0.25;           // F

  SplitTargets normalized() const;
  bool operator==(const SplitTargets&) const = default;
};

struct BuildOptions {
  std::size_t remove_n = 1000;
  std::uint64_t removal_seed = 0;
  std::uint64_t fake_seed = 1;
  std::uint64_t split_seed = 2;
  SplitTargets targets;

  bool operator==(const BuildOptions&) const = default;
};

struct QueryDataset {
  SymbolTable entities;  // retained first, then removed
  std::size_t num_retained = 0;
  SymbolTable relations;
  TripleSet train;
  std::vector<AnswerRecord> dev;
  std::vector<AnswerRecord> test;
  BuildOptions options;
  std::vector<std::string> warnings;

  std::size_t num_removed() const { return entities.size() - num_retained; }
  bool operator==(const QueryDataset& o) const {
    return entities == o.entities && num_retained == o.num_retained &&
           relations == o.relations && train == o.train && dev == o.dev &&
           test == o.test && options == o.options && warnings == o.warnings;
  }
};

/// Per-label, per-direction query counts.
struct LabelCounts {
  // [label][direction]
  std::array<std::array<std::size_t, 2>, 4> cells{};

  std::size_t get(Label l, Direction d) const {
    return cells[static_cast<int>(l)][static_cast<int>(d)];
  }
  std::size_t total(Label l) const { return get(l, Direction::Head) + get(l, Direction::Tail); }
  std::size_t pool() const;
  void add(const AnswerRecord& r);
  LabelCounts& operator+=(const LabelCounts& o);
};

LabelCounts count_labels(std::span<const AnswerRecord> records);

// --- construction steps (knowledge-base entity ids) ---

/// Uniform sample of n entities without replacement; result sorted.
std::vector<EntityId> select_removal_set(const KnowledgeBase& kb, std::size_t n,
                                         std::uint64_t seed);

struct TrainSplit {
  TripleSet train;
  TripleSet held_out;
};

TrainSplit split_train(const KnowledgeBase& kb,
                       std::span<const EntityId> removed);

/// Queries anchored at retained entities with their answers in held_out.
/// Output is sorted by query; labels are not yet meaningful.
std::vector<AnswerRecord> group_queries(const TripleSet& held_out,
                                        std::size_t num_entities,
                                        std::span<const EntityId> removed);

void prune_answers(std::vector<AnswerRecord>& records,
                   std::span<const EntityId> removed);

/// Number of type-violating queries available for sampling.
std::size_t count_fake_candidates(const KnowledgeBase& kb,
                                  std::span<const EntityId> removed,
                                  std::span<const AnswerRecord> answerable);

std::vector<AnswerRecord> generate_fake_queries(
    const KnowledgeBase& kb, std::span<const EntityId> removed,
    std::span<const AnswerRecord> answerable, std::size_t count,
    std::uint64_t seed);

/// Number of F queries that brings the empty-answer share (N plus F) to its
/// target given the observed answered and N counts.
std::size_t fake_query_count(const SplitTargets& targets, std::size_t answered,
                             std::size_t empty_removed);

struct EvaluationSplit {
  std::vector<AnswerRecord> dev;
  std::vector<AnswerRecord> test;
};

/// Stratified even split of records ∪ fakes. Appends a warning when the
/// achieved composition misses the targets by more than 5 points.
EvaluationSplit balance_and_split(std::vector<AnswerRecord> records,
                                  std::vector<AnswerRecord> fakes,
                                  const SplitTargets& targets,
                                  std::uint64_t seed,
                                  std::vector<std::string>* warnings = nullptr);

/// Runs the whole pipeline and re-interns into dataset entity ids.
QueryDataset build_dataset(const KnowledgeBase& kb, const BuildOptions& options);

// --- persistence ---

inline constexpr int kDatasetFormatVersion = 1;

void write_dataset(const QueryDataset& ds, const std::filesystem::path& dir);
QueryDataset read_dataset(const std::filesystem::path& dir);

/// SHA-256 over the dataset's serialized content files.
std::string dataset_checksum(const QueryDataset& ds);

}  // namespace kbcq
