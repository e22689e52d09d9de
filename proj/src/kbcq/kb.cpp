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

#include "kbcq/kb.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "kbcq/common.hpp"

namespace kbcq {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

[[noreturn]] void parse_error(const std::string& source, std::size_t line_no,
                              const std::string& msg) {
  throw Error(ErrorCode::Parse,
              source + ":" + std::to_string(line_no) + ": " + msg);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

}  // namespace

std::uint32_t SymbolTable::intern(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it != index_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), id);
  return id;
}

std::optional<std::uint32_t> SymbolTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool TripleSet::insert(const Triple& t) {
  if (!members_.insert(t).second) return false;
  triples_.push_back(t);
  tails_of_[key(t.head, t.relation)].push_back(t.tail);
  heads_of_[key(t.tail, t.relation)].push_back(t.head);
  return true;
}

std::span<const EntityId> TripleSet::completions(const Query& q) const {
  const auto& index = q.direction == Direction::Tail ? tails_of_ : heads_of_;
  auto it = index.find(key(q.anchor, q.relation));
  if (it == index.end()) return {};
  return it->second;
}

void TypeSystem::add_entity_type(EntityId e, TypeId t) {
  auto& set = entity_types_.at(e);
  auto pos = std::lower_bound(set.begin(), set.end(), t);
  if (pos == set.end() || *pos != t) set.insert(pos, t);
}

void TypeSystem::set_signature(RelationId r, TypeId domain, TypeId range) {
  domain_.at(r) = domain;
  range_.at(r) = range;
}

std::span<const TypeId> TypeSystem::types_of(EntityId e) const {
  if (e >= entity_types_.size()) return {};
  return entity_types_[e];
}

bool TypeSystem::has_type(EntityId e, TypeId t) const {
  auto set = types_of(e);
  return std::binary_search(set.begin(), set.end(), t);
}

std::optional<TypeId> TypeSystem::domain(RelationId r) const {
  return r < domain_.size() ? domain_[r] : std::nullopt;
}

std::optional<TypeId> TypeSystem::range(RelationId r) const {
  return r < range_.size() ? range_[r] : std::nullopt;
}

TripleSet parse_triples(std::istream& in, const std::string& source,
                        SymbolTable& entities, SymbolTable& relations,
                        std::vector<std::string>* warnings) {
  TripleSet set;
  std::string raw;
  std::size_t line_no = 0;
  std::size_t duplicates = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3) {
      parse_error(source, line_no,
                  "expected 3 tab-separated fields, found " +
                      std::to_string(fields.size()));
    }
    for (auto f : fields) {
      if (f.empty()) parse_error(source, line_no, "empty field");
    }
    const Triple t{entities.intern(fields[0]), relations.intern(fields[1]),
                   entities.intern(fields[2])};
    if (!set.insert(t)) ++duplicates;
  }
  if (duplicates > 0 && warnings) {
    warnings->push_back(source + ": dropped " + std::to_string(duplicates) +
                        " duplicate triple(s)");
  }
  return set;
}

TripleSet load_triples(const std::filesystem::path& path, SymbolTable& entities,
                       SymbolTable& relations,
                       std::vector<std::string>* warnings) {
  auto in = open_input(path);
  return parse_triples(in, path.string(), entities, relations, warnings);
}

void write_triples(std::ostream& out, const TripleSet& triples,
                   const SymbolTable& entities, const SymbolTable& relations) {
  for (const auto& t : triples) {
    out << entities.name(t.head) << '\t' << relations.name(t.relation) << '\t'
        << entities.name(t.tail) << '\n';
  }
}

KnowledgeBase load_knowledge_base(const std::filesystem::path& train,
                                  const std::filesystem::path& valid,
                                  const std::filesystem::path& test) {
  KnowledgeBase kb;
  kb.train = load_triples(train, kb.entities, kb.relations, &kb.warnings);
  kb.valid = load_triples(valid, kb.entities, kb.relations, &kb.warnings);
  kb.test = load_triples(test, kb.entities, kb.relations, &kb.warnings);

  auto check_disjoint = [&](const TripleSet& a, const TripleSet& b,
                            const char* an, const char* bn) {
    const TripleSet& small = a.size() <= b.size() ? a : b;
    const TripleSet& large = a.size() <= b.size() ? b : a;
    for (const auto& t : small) {
      if (large.contains(t)) {
        throw Error(ErrorCode::Parse,
                    std::string("splits ") + an + " and " + bn +
                        " share the triple " + kb.entities.name(t.head) + " " +
                        kb.relations.name(t.relation) + " " +
                        kb.entities.name(t.tail));
      }
    }
  };
  check_disjoint(kb.train, kb.valid, "train", "valid");
  check_disjoint(kb.train, kb.test, "train", "test");
  check_disjoint(kb.valid, kb.test, "valid", "test");
  kb.types = TypeSystem(kb.entities.size(), kb.relations.size());
  return kb;
}

TypeSystem parse_type_system(std::istream& entity_types,
                             std::istream& relation_signatures,
                             const SymbolTable& entities,
                             const SymbolTable& relations,
                             std::vector<std::string>* warnings) {
  TypeSystem ts(entities.size(), relations.size());
  std::string raw;
  std::size_t line_no = 0;
  std::size_t unknown_entities = 0;
  while (std::getline(entity_types, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 2 || fields[0].empty()) {
      parse_error("entity types", line_no,
                  "expected entity<TAB>comma-separated-types");
    }
    const auto id = entities.find(fields[0]);
    if (!id) {
      ++unknown_entities;
      continue;
    }
    if (fields[1].empty()) continue;
    for (auto type : split(fields[1], ',')) {
      if (type.empty()) continue;
      ts.add_entity_type(*id, ts.types().intern(type));
    }
  }

  line_no = 0;
  std::size_t unknown_relations = 0;
  while (std::getline(relation_signatures, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() ||
        fields[2].empty()) {
      parse_error("relation signatures", line_no,
                  "expected relation<TAB>domain<TAB>range");
    }
    const auto id = relations.find(fields[0]);
    if (!id) {
      ++unknown_relations;
      continue;
    }
    const TypeId dom = ts.types().intern(fields[1]);
    const TypeId rng = ts.types().intern(fields[2]);
    ts.set_signature(*id, dom, rng);
  }

  if (warnings) {
    if (unknown_entities > 0) {
      warnings->push_back("entity types: skipped " +
                          std::to_string(unknown_entities) +
                          " entity line(s) not present in the knowledge base");
    }
    if (unknown_relations > 0) {
      warnings->push_back("relation signatures: skipped " +
                          std::to_string(unknown_relations) +
                          " relation line(s) not present in the knowledge base");
    }
    std::size_t unsigned_relations = 0;
    for (RelationId r = 0; r < relations.size(); ++r) {
      if (!ts.has_signature(r)) ++unsigned_relations;
    }
    if (unsigned_relations > 0) {
      warnings->push_back(std::to_string(unsigned_relations) +
                          " relation(s) have no domain/range signature");
    }
  }
  return ts;
}

TypeSystem load_type_system(const std::filesystem::path& entity_types,
                            const std::filesystem::path& relation_signatures,
                            const SymbolTable& entities,
                            const SymbolTable& relations,
                            std::vector<std::string>* warnings) {
  auto ent = open_input(entity_types);
  auto rel = open_input(relation_signatures);
  return parse_type_system(ent, rel, entities, relations, warnings);
}

bool is_type_consistent(const Query& q, const TypeSystem& ts) {
  const auto required =
      q.direction == Direction::Tail ? ts.domain(q.relation) : ts.range(q.relation);
  if (!required) return true;
  return ts.has_type(q.anchor, *required);
}

}  // namespace kbcq
