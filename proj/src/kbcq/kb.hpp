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

// Knowledge-base core: symbol interning, triple sets with adjacency indexes,
// and the entity/relation type system used to detect type-violating queries.

#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace kbcq {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;
using TypeId = std::uint32_t;

/// Bijection between opaque identifiers and dense indices, in first-seen order.
class SymbolTable {
 public:
  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  const std::string& name(std::uint32_t id) const { return names_.at(id); }
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  bool operator==(const SymbolTable& other) const {
    return names_ == other.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct Triple {
  EntityId head = 0;
  RelationId relation = 0;
  EntityId tail = 0;

  auto operator<=>(const Triple&) const = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    std::uint64_t x = (static_cast<std::uint64_t>(t.head) << 32) ^ t.tail;
    x ^= static_cast<std::uint64_t>(t.relation) * 0x9E3779B97F4A7C15ull;
    x ^= x >> 31;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 29;
    return static_cast<std::size_t>(x);
  }
};

enum class Direction : std::uint8_t { Tail = 0, Head = 1 };

/// (anchor, relation, ?) for Direction::Tail, (?, relation, anchor) for Head.
struct Query {
  Direction direction = Direction::Tail;
  EntityId anchor = 0;
  RelationId relation = 0;

  Triple complete(EntityId entity) const {
    return direction == Direction::Tail ? Triple{anchor, relation, entity}
                                        : Triple{entity, relation, anchor};
  }

  auto operator<=>(const Query&) const = default;
};

struct QueryHash {
  std::size_t operator()(const Query& q) const noexcept {
    return TripleHash{}(Triple{q.anchor, q.relation,
                               static_cast<EntityId>(q.direction)});
  }
};

/// Deduplicated list of triples with O(1) membership and per-(entity,
/// relation) adjacency in both directions.
class TripleSet {
 public:
  /// Returns false if the triple was already present.
  bool insert(const Triple& t);
  bool contains(const Triple& t) const { return members_.contains(t); }

  const std::vector<Triple>& triples() const noexcept { return triples_; }
  std::size_t size() const noexcept { return triples_.size(); }
  bool empty() const noexcept { return triples_.empty(); }
  auto begin() const { return triples_.begin(); }
  auto end() const { return triples_.end(); }

  /// Entities i such that q ∘ i is in the set, in insertion order.
  std::span<const EntityId> completions(const Query& q) const;

  bool operator==(const TripleSet& other) const {
    return triples_ == other.triples_;
  }

 private:
  static std::uint64_t key(EntityId e, RelationId r) {
    return (static_cast<std::uint64_t>(e) << 32) | r;
  }

  std::vector<Triple> triples_;
  std::unordered_set<Triple, TripleHash> members_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> tails_of_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> heads_of_;
};

/// Entity type sets plus one domain and one range type per relation.
class TypeSystem {
 public:
  TypeSystem() = default;
  TypeSystem(std::size_t num_entities, std::size_t num_relations)
      : entity_types_(num_entities),
        domain_(num_relations),
        range_(num_relations) {}

  SymbolTable& types() { return types_; }
  const SymbolTable& types() const { return types_; }

  void add_entity_type(EntityId e, TypeId t);
  void set_signature(RelationId r, TypeId domain, TypeId range);

  std::span<const TypeId> types_of(EntityId e) const;
  bool has_type(EntityId e, TypeId t) const;
  bool is_typed(EntityId e) const { return !types_of(e).empty(); }

  std::optional<TypeId> domain(RelationId r) const;
  std::optional<TypeId> range(RelationId r) const;
  bool has_signature(RelationId r) const {
    return domain(r).has_value() && range(r).has_value();
  }

  std::size_t num_entities() const { return entity_types_.size(); }
  std::size_t num_relations() const { return domain_.size(); }
  bool empty() const { return types_.size() == 0; }

 private:
  SymbolTable types_;
  std::vector<std::vector<TypeId>> entity_types_;  // sorted
  std::vector<std::optional<TypeId>> domain_;
  std::vector<std::optional<TypeId>> range_;
};

struct KnowledgeBase {
  SymbolTable entities;
  SymbolTable relations;
  TripleSet train;
  TripleSet valid;
  TripleSet test;
  TypeSystem types;
  std::vector<std::string> warnings;

  bool has_types() const { return !types.empty(); }
};

/// Parses a tab-separated triple file, interning new symbols in first-seen
/// order. Duplicate triples are dropped and counted in one warning.
TripleSet load_triples(const std::filesystem::path& path, SymbolTable& entities,
                       SymbolTable& relations,
                       std::vector<std::string>* warnings = nullptr);

TripleSet parse_triples(std::istream& in, const std::string& source,
                        SymbolTable& entities, SymbolTable& relations,
                        std::vector<std::string>* warnings = nullptr);

void write_triples(std::ostream& out, const TripleSet& triples,
                   const SymbolTable& entities, const SymbolTable& relations);

/// Loads train/valid/test and checks that the three splits are disjoint.
KnowledgeBase load_knowledge_base(const std::filesystem::path& train,
                                  const std::filesystem::path& valid,
                                  const std::filesystem::path& test);

/// Entities or relations that do not occur in the given symbol tables are
/// skipped with a warning; entities absent from the file stay untyped.
TypeSystem load_type_system(const std::filesystem::path& entity_types,
                            const std::filesystem::path& relation_signatures,
                            const SymbolTable& entities,
                            const SymbolTable& relations,
                            std::vector<std::string>* warnings = nullptr);

TypeSystem parse_type_system(std::istream& entity_types,
                             std::istream& relation_signatures,
                             const SymbolTable& entities,
                             const SymbolTable& relations,
                             std::vector<std::string>* warnings = nullptr);

/// Tail query (h,r,?) requires dom(r) ∈ T_h; head query (?,r,t) requires
/// rng(r) ∈ T_t. Untyped anchors fail; relations without a signature pass.
bool is_type_consistent(const Query& q, const TypeSystem& ts);

}  // namespace kbcq
