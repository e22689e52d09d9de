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

// Dataset directory layout:
//   entities.txt           retained entities, one per line, in id order
//   removed_entities.txt   removed entities, one per line
//   relations.txt          relations in id order
//   train.tsv              head<TAB>relation<TAB>tail
//   dev.tsv, test.tsv      direction<TAB>anchor<TAB>relation<TAB>label<TAB>answers
//   dev_removed.tsv, test_removed.tsv
//                          direction<TAB>anchor<TAB>relation<TAB>removed answers
//                          for every query that lost answers to removal
//   manifest.json          version, build parameters, counts, checksum

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "kbcq/common.hpp"
#include "kbcq/dataset.hpp"

namespace kbcq {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kContentFiles[] = {
    "entities.txt", "removed_entities.txt", "relations.txt", "train.tsv",
    "dev.tsv",      "dev_removed.tsv",      "test.tsv",      "test_removed.tsv",
};

const char* direction_name(Direction d) {
  return d == Direction::Tail ? "tail" : "head";
}

Direction parse_direction(std::string_view s) {
  if (s == "tail") return Direction::Tail;
  if (s == "head") return Direction::Head;
  throw Error(ErrorCode::Parse, "unknown query direction '" + std::string(s) + "'");
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> lines_of(const std::string& text) {
  std::vector<std::string_view> out;
  std::string_view rest(text);
  while (!rest.empty()) {
    auto pos = rest.find('\n');
    auto line = rest.substr(0, pos);
    if (!line.empty()) out.push_back(line);
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 1);
  }
  return out;
}

void check_name(const std::string& name) {
  if (name.find_first_of("\t\n;") != std::string::npos) {
    throw Error(ErrorCode::InvalidArgument,
                "identifier '" + name + "' contains a tab, newline or ';'");
  }
}

std::string join_names(const SymbolTable& syms, std::span<const EntityId> ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out.push_back(';');
    out += syms.name(ids[i]);
  }
  return out;
}

std::string query_prefix(const QueryDataset& ds, const Query& q) {
  return std::string(direction_name(q.direction)) + '\t' +
         ds.entities.name(q.anchor) + '\t' + ds.relations.name(q.relation);
}

std::map<std::string, std::string> serialize(const QueryDataset& ds) {
  std::map<std::string, std::string> files;
  std::ostringstream ent, rem, rel, train;
  for (std::size_t i = 0; i < ds.entities.size(); ++i) {
    check_name(ds.entities.name(i));
    (i < ds.num_retained ? ent : rem) << ds.entities.name(i) << '\n';
  }
  for (const auto& r : ds.relations.names()) {
    check_name(r);
    rel << r << '\n';
  }
  write_triples(train, ds.train, ds.entities, ds.relations);
  files["entities.txt"] = ent.str();
  files["removed_entities.txt"] = rem.str();
  files["relations.txt"] = rel.str();
  files["train.tsv"] = train.str();

  auto write_split = [&](const std::vector<AnswerRecord>& recs,
                         const std::string& name) {
    std::ostringstream main, removed;
    for (const auto& rec : recs) {
      const auto prefix = query_prefix(ds, rec.query);
      main << prefix << '\t' << label_char(rec.label) << '\t'
           << join_names(ds.entities, rec.final_answers) << '\n';
      if (rec.pre_removal_answers.size() != rec.final_answers.size()) {
        std::vector<EntityId> lost;
        std::set_difference(rec.pre_removal_answers.begin(),
                            rec.pre_removal_answers.end(),
                            rec.final_answers.begin(), rec.final_answers.end(),
                            std::back_inserter(lost));
        removed << prefix << '\t' << join_names(ds.entities, lost) << '\n';
      }
    }
    files[name + ".tsv"] = main.str();
    files[name + "_removed.tsv"] = removed.str();
  };
  write_split(ds.dev, "dev");
  write_split(ds.test, "test");
  return files;
}

std::string checksum_of(const std::map<std::string, std::string>& files) {
  std::vector<std::string> parts;
  for (const char* name : kContentFiles) {
    const auto& content = files.at(name);
    parts.push_back(std::string(name) + "\n" + std::to_string(content.size()) + "\n");
    parts.push_back(content);
  }
  return sha256_hex(parts);
}

json counts_json(const LabelCounts& c) {
  json out = json::object();
  for (Label l : {Label::C, Label::I, Label::N, Label::F}) {
    out[std::string(1, label_char(l))] = {
        {"head", c.get(l, Direction::Head)},
        {"tail", c.get(l, Direction::Tail)},
        {"total", c.total(l)},
    };
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "missing dataset file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

EntityId lookup_entity(const QueryDataset& ds, std::string_view name,
                       const std::string& where) {
  auto id = ds.entities.find(name);
  if (!id) throw Error(ErrorCode::Parse, where + ": unknown entity '" + std::string(name) + "'");
  return *id;
}

std::vector<EntityId> parse_entity_list(const QueryDataset& ds, std::string_view field,
                                        const std::string& where) {
  std::vector<EntityId> out;
  if (field.empty()) return out;
  for (auto name : split(field, ';')) out.push_back(lookup_entity(ds, name, where));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<AnswerRecord> parse_split(QueryDataset& ds, const std::string& main,
                                      const std::string& removed,
                                      const std::string& name) {
  std::vector<AnswerRecord> recs;
  std::map<Query, std::size_t> index;
  std::size_t line_no = 0;
  for (auto line : lines_of(main)) {
    ++line_no;
    const std::string where = name + ".tsv:" + std::to_string(line_no);
    const auto f = split(line, '\t');
    if (f.size() != 5 || f[3].size() != 1) {
      throw Error(ErrorCode::Parse, where + ": malformed query line");
    }
    AnswerRecord rec;
    rec.query.direction = parse_direction(f[0]);
    rec.query.anchor = lookup_entity(ds, f[1], where);
    auto rel = ds.relations.find(f[2]);
    if (!rel) throw Error(ErrorCode::Parse, where + ": unknown relation '" + std::string(f[2]) + "'");
    rec.query.relation = *rel;
    rec.label = parse_label(f[3][0]);
    rec.final_answers = parse_entity_list(ds, f[4], where);
    rec.pre_removal_answers = rec.final_answers;
    if (rec.query.anchor >= ds.num_retained) {
      throw Error(ErrorCode::Parse, where + ": query anchored at a removed entity");
    }
    for (auto e : rec.final_answers) {
      if (e >= ds.num_retained) {
        throw Error(ErrorCode::Parse, where + ": removed entity in the answer set");
      }
    }
    index.emplace(rec.query, recs.size());
    recs.push_back(std::move(rec));
  }

  line_no = 0;
  for (auto line : lines_of(removed)) {
    ++line_no;
    const std::string where = name + "_removed.tsv:" + std::to_string(line_no);
    const auto f = split(line, '\t');
    if (f.size() != 4) throw Error(ErrorCode::Parse, where + ": malformed line");
    Query q{parse_direction(f[0]), lookup_entity(ds, f[1], where), 0};
    auto rel = ds.relations.find(f[2]);
    if (!rel) throw Error(ErrorCode::Parse, where + ": unknown relation");
    q.relation = *rel;
    auto it = index.find(q);
    if (it == index.end()) throw Error(ErrorCode::Parse, where + ": query not in " + name + ".tsv");
    auto& rec = recs[it->second];
    for (auto e : parse_entity_list(ds, f[3], where)) rec.pre_removal_answers.push_back(e);
    std::sort(rec.pre_removal_answers.begin(), rec.pre_removal_answers.end());
  }

  for (const auto& rec : recs) {
    const bool complete = rec.pre_removal_answers.size() == rec.final_answers.size();
    bool ok = false;
    switch (rec.label) {
      case Label::C: ok = complete && !rec.final_answers.empty(); break;
      case Label::I: ok = !complete && !rec.final_answers.empty(); break;
      case Label::N: ok = !complete && rec.final_answers.empty(); break;
      case Label::F: ok = rec.pre_removal_answers.empty(); break;
    }
    if (!ok) {
      throw Error(ErrorCode::Parse, name + ": label " + label_char(rec.label) +
                                        " inconsistent with the answer sets of " +
                                        query_prefix(ds, rec.query));
    }
  }
  return recs;
}

}  // namespace

std::string dataset_checksum(const QueryDataset& ds) {
  return checksum_of(serialize(ds));
}

void write_dataset(const QueryDataset& ds, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());

  const auto files = serialize(ds);
  for (const auto& [name, content] : files) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + (dir / name).string());
    out << content;
  }

  const auto dev = count_labels(ds.dev);
  const auto test = count_labels(ds.test);
  auto total = dev;
  total += test;
  const double pool = static_cast<double>(total.pool());
  auto frac = [&](std::size_t n) { return pool > 0 ? n / pool : 0.0; };

  json manifest;
  manifest["format"] = "kbcq-dataset";
  manifest["version"] = kDatasetFormatVersion;
  manifest["build"] = {
      {"remove_n", ds.options.remove_n},
      {"removal_seed", ds.options.removal_seed},
      {"fake_seed", ds.options.fake_seed},
      {"split_seed", ds.options.split_seed},
      {"targets",
       {{"empty_removed", ds.options.targets.empty_removed},
        {"answered", ds.options.targets.answered},
        {"fake", ds.options.targets.fake}}},
  };
  manifest["entities_retained"] = ds.num_retained;
  manifest["entities_removed"] = ds.num_removed();
  manifest["relations"] = ds.relations.size();
  manifest["train_triples"] = ds.train.size();
  manifest["counts"] = {{"dev", counts_json(dev)},
                        {"test", counts_json(test)},
                        {"total", counts_json(total)}};
  manifest["fractions"] = {
      {"N", frac(total.total(Label::N))},
      {"answered", frac(total.pool() - total.total(Label::N) - total.total(Label::F))},
      {"F", frac(total.total(Label::F))},
  };
  manifest["warnings"] = ds.warnings;
  manifest["checksum"] = checksum_of(files);

  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

QueryDataset read_dataset(const std::filesystem::path& dir) {
  json manifest;
  try {
    manifest = json::parse(read_file(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, "manifest.json: " + std::string(e.what()));
  }
  if (manifest.value("format", "") != "kbcq-dataset" ||
      manifest.value("version", 0) != kDatasetFormatVersion) {
    throw Error(ErrorCode::Parse, "manifest.json: unsupported dataset format or version");
  }

  std::map<std::string, std::string> files;
  for (const char* name : kContentFiles) files[name] = read_file(dir / name);
  if (checksum_of(files) != manifest.value("checksum", "")) {
    throw Error(ErrorCode::Parse, "dataset checksum mismatch in " + dir.string());
  }

  QueryDataset ds;
  try {
    const auto& b = manifest.at("build");
    ds.options.remove_n = b.at("remove_n").get<std::size_t>();
    ds.options.removal_seed = b.at("removal_seed").get<std::uint64_t>();
    ds.options.fake_seed = b.at("fake_seed").get<std::uint64_t>();
    ds.options.split_seed = b.at("split_seed").get<std::uint64_t>();
    const auto& t = b.at("targets");
    ds.options.targets = {t.at("empty_removed").get<double>(),
                          t.at("answered").get<double>(), t.at("fake").get<double>()};
    ds.warnings = manifest.at("warnings").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, "manifest.json: " + std::string(e.what()));
  }

  for (auto line : lines_of(files["entities.txt"])) ds.entities.intern(line);
  ds.num_retained = ds.entities.size();
  for (auto line : lines_of(files["removed_entities.txt"])) ds.entities.intern(line);
  for (auto line : lines_of(files["relations.txt"])) ds.relations.intern(line);

  const std::size_t known_entities = ds.entities.size();
  const std::size_t known_relations = ds.relations.size();
  std::istringstream train(files["train.tsv"]);
  ds.train = parse_triples(train, "train.tsv", ds.entities, ds.relations);
  if (ds.entities.size() != known_entities || ds.relations.size() != known_relations) {
    throw Error(ErrorCode::Parse, "train.tsv mentions symbols missing from the symbol tables");
  }
  for (const auto& tr : ds.train) {
    if (tr.head >= ds.num_retained || tr.tail >= ds.num_retained) {
      throw Error(ErrorCode::Parse, "train.tsv mentions a removed entity");
    }
  }
  ds.dev = parse_split(ds, files["dev.tsv"], files["dev_removed.tsv"], "dev");
  ds.test = parse_split(ds, files["test.tsv"], files["test_removed.tsv"], "test");
  return ds;
}

}  // namespace kbcq
