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

#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <string>
#include <tuple>

namespace kbcq_test_files {

namespace fs = std::filesystem;

inline fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("kbcq_files_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

inline void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

inline std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Typed KB on disk: 120 entities of 3 types, 3 relations, 900 triples split
// 80/10/10 into train.txt, valid.txt and test.txt, plus types.tsv and sigs.tsv.
inline fs::path write_typed_kb(const std::string& name) {
  const auto dir = fresh_dir(name);
  const char* types[] = {"person", "place", "org"};
  const int dom[] = {0, 2, 0}, rng[] = {1, 1, 2};
  std::string train, valid, test, ent, sig;
  std::set<std::tuple<int, int, int>> seen;
  unsigned state = 12345;
  auto next = [&](unsigned n) {
    state = state * 1103515245u + 12345u;
    return (state >> 8) % n;
  };
  int k = 0;
  for (int e = 0; e < 120; ++e) {
    ent += "e" + std::to_string(e) + '\t' + types[e % 3] + '\n';
  }
  while (seen.size() < 900) {
    const int r = static_cast<int>(next(3));
    const int h = static_cast<int>(next(40)) * 3 + dom[r];
    const int t = static_cast<int>(next(40)) * 3 + rng[r];
    if (!seen.insert({h, r, t}).second) continue;
    const std::string line = "e" + std::to_string(h) + "\tr" + std::to_string(r) + "\te" +
                             std::to_string(t) + '\n';
    (k % 10 == 8 ? valid : k % 10 == 9 ? test : train) += line;
    ++k;
  }
  for (int r = 0; r < 3; ++r) {
    sig += "r" + std::to_string(r) + '\t' + types[dom[r]] + '\t' + types[rng[r]] + '\n';
  }
  write(dir / "train.txt", train);
  write(dir / "valid.txt", valid);
  write(dir / "test.txt", test);
  write(dir / "types.tsv", ent);
  write(dir / "sigs.tsv", sig);
  return dir;
}

}  // namespace kbcq_test_files
