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

// Checkpoint layout:
//   kind<TAB>d<TAB>|E|<TAB>|R|<TAB>inverseFlag
//   |E| entity rows, 2|R| relation rows, then 2|R| scale rows for Region,
//   each a space-separated list of shortest round-trip decimals
//   |E| entity names, |R| relation names, one per line

#include <charconv>
#include <fstream>
#include <sstream>

#include "kbcq/model.hpp"

namespace kbcq {

namespace {

void write_rows(std::string& out, const Matrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out.push_back(' ');
      out += format_double(row[c]);
    }
    out.push_back('\n');
  }
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : rest_(text) {}

  std::string_view next() {
    if (rest_.empty()) {
      throw Error(ErrorCode::Parse, "checkpoint truncated at line " + std::to_string(line_ + 1));
    }
    ++line_;
    const auto pos = rest_.find('\n');
    auto line = rest_.substr(0, pos);
    rest_.remove_prefix(pos == std::string_view::npos ? rest_.size() : pos + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  }

  std::size_t line() const { return line_; }

 private:
  std::string_view rest_;
  std::size_t line_ = 0;
};

[[noreturn]] void bad(const LineReader& in, const std::string& msg) {
  throw Error(ErrorCode::Parse, "checkpoint line " + std::to_string(in.line()) + ": " + msg);
}

std::size_t parse_count(const LineReader& in, std::string_view field) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) bad(in, "invalid count");
  return v;
}

void read_rows(LineReader& in, Matrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto line = in.next();
    auto row = m.row(r);
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (std::size_t c = 0; c < row.size(); ++c) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      auto [next, ec] = std::from_chars(p, end, row[c]);
      if (ec != std::errc()) bad(in, "expected " + std::to_string(row.size()) + " values");
      p = next;
    }
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    if (p != end) bad(in, "trailing data in row");
  }
}

}  // namespace

std::string serialize_checkpoint(const ModelParams& p, const SymbolTable& entities,
                                 const SymbolTable& relations) {
  if (entities.size() != p.num_entities || relations.size() != p.num_relations) {
    throw Error(ErrorCode::Mismatch, "symbol tables do not match the parameter tables");
  }
  std::string out;
  out += std::string(model_kind_name(p.kind)) + '\t' + std::to_string(p.dim) + '\t' +
         std::to_string(p.num_entities) + '\t' + std::to_string(p.num_relations) + '\t' +
         (p.inverse_relations ? "1" : "0") + '\n';
  write_rows(out, p.entity);
  write_rows(out, p.relation);
  if (p.kind == ModelKind::Region) write_rows(out, p.scale);
  for (const auto& n : entities.names()) out += n + '\n';
  for (const auto& n : relations.names()) out += n + '\n';
  return out;
}

void write_checkpoint(const std::filesystem::path& path, const ModelParams& p,
                      const SymbolTable& entities, const SymbolTable& relations) {
  const auto text = serialize_checkpoint(p, entities, relations);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write checkpoint " + path.string());
  out << text;
}

Checkpoint parse_checkpoint(std::string_view text) {
  LineReader in(text);
  const auto header = in.next();
  std::vector<std::string_view> f;
  std::size_t start = 0;
  while (true) {
    auto pos = header.find('\t', start);
    f.push_back(header.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (f.size() != 5) bad(in, "header must have 5 tab-separated fields");
  const auto kind = parse_model_kind(f[0]);
  if (!kind) bad(in, "unknown model kind '" + std::string(f[0]) + "'");
  if (f[4] != "0" && f[4] != "1") bad(in, "inverse flag must be 0 or 1");

  Checkpoint ck;
  auto& p = ck.params;
  p.kind = *kind;
  p.dim = parse_count(in, f[1]);
  p.num_entities = parse_count(in, f[2]);
  p.num_relations = parse_count(in, f[3]);
  p.inverse_relations = f[4] == "1";
  if (p.dim == 0) bad(in, "dimension must be positive");
  p.entity = Matrix(p.num_entities, p.width());
  p.relation = Matrix(2 * p.num_relations, p.width());
  read_rows(in, p.entity);
  read_rows(in, p.relation);
  if (p.kind == ModelKind::Region) {
    p.scale = Matrix(2 * p.num_relations, p.dim);
    read_rows(in, p.scale);
  }
  for (std::size_t i = 0; i < p.num_entities; ++i) ck.entities.intern(in.next());
  for (std::size_t i = 0; i < p.num_relations; ++i) ck.relations.intern(in.next());
  if (ck.entities.size() != p.num_entities || ck.relations.size() != p.num_relations) {
    throw Error(ErrorCode::Parse, "checkpoint symbol tables contain duplicates");
  }
  return ck;
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint(ss.str());
}

}  // namespace kbcq
