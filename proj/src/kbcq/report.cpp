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

#include <json.hpp>

#include "kbcq/evaluator.hpp"

namespace kbcq {

namespace {

using json = nlohmann::ordered_json;

const char* mode_name(ThresholdMode m) {
  return m == ThresholdMode::Global ? "global" : "per-relation";
}

// Column-safe subset tags for the flat table.
const char* subset_tag(Subset s) {
  switch (s) {
    case Subset::Full: return "full";
    case Subset::C: return "C";
    case Subset::CF: return "CF";
    case Subset::I: return "I";
  }
  return "?";
}

const char* mode_tag(ThresholdMode m) { return m == ThresholdMode::Global ? "global" : "multi"; }

json grid_json(bool relation) {
  json g = json::array();
  if (relation) {
    for (auto k : kRelationGrid) g.push_back(grid_value(k));
  } else {
    for (std::size_t k = 0; k < kGridSize; ++k) g.push_back(grid_value(k));
  }
  return g;
}

}  // namespace

std::string report_to_json(const EvalReport& report, const QueryDataset& ds) {
  json j;
  j["format"] = "kbcq-report";
  j["split"] = report.split;
  j["model"] = report.model;
  j["dim"] = report.dim;
  j["checkpoint"] = report.checkpoint;
  j["dataset_checksum"] = report.dataset_checksum;
  j["mrr"] = report.mrr;
  j["ranked_completions"] = report.ranked;
  j["tie_handling"] = "pessimistic";
  j["grids"] = {{"global", grid_json(false)}, {"per_relation", grid_json(true)}};
  j["tuning_iterations"] = report.tuning_iterations;

  const std::size_t nrel = ds.relations.size();
  json modes = json::array();
  for (const auto& m : report.modes) {
    json mj;
    mj["mode"] = mode_name(m.mode);
    json subsets = json::array();
    for (auto s : kAllSubsets) {
      const auto& prf = m.subsets[static_cast<int>(s)];
      subsets.push_back({{"subset", subset_name(s)},
                         {"precision", prf.precision},
                         {"recall", prf.recall},
                         {"f1", prf.f1},
                         {"tp", prf.totals.tp},
                         {"fp", prf.totals.fp},
                         {"fn", prf.totals.fn}});
    }
    mj["subsets"] = std::move(subsets);
    mj["dev_f1_full"] = m.dev_f1;
    if (m.mode == ThresholdMode::Global) {
      mj["threshold"] = m.thresholds.global;
    } else {
      json rows = json::array();
      for (std::size_t r = 0; r < m.thresholds.per_row.size(); ++r) {
        const std::size_t base = nrel ? r % nrel : r;
        rows.push_back({{"relation", base < nrel ? ds.relations.name(static_cast<RelationId>(base))
                                                 : std::to_string(base)},
                        {"inverse", r >= nrel},
                        {"threshold", m.thresholds.per_row[r]}});
      }
      mj["thresholds"] = std::move(rows);
      json trace = json::array();
      for (const auto& st : m.trace) {
        trace.push_back({{"iteration", st.iteration},
                         {"row", st.row},
                         {"threshold", st.threshold},
                         {"dev_f1", st.f1}});
      }
      mj["accepted_updates"] = std::move(trace);
    }
    mj["threshold_stats"] = {{"mean", m.stats.mean},
                             {"min", m.stats.min},
                             {"max", m.stats.max},
                             {"rows", m.stats.rows}};
    modes.push_back(std::move(mj));
  }
  j["modes"] = std::move(modes);
  return j.dump(2) + "\n";
}

std::string report_to_tsv(const EvalReport& report) {
  std::string header = "model\tdim\tsplit\tmrr";
  std::string row = report.model + '\t' + std::to_string(report.dim) + '\t' + report.split + '\t' +
                    format_double(report.mrr);
  for (const char* metric : {"f1", "precision", "recall"}) {
    for (const auto& m : report.modes) {
      for (auto s : kAllSubsets) {
        const auto& prf = m.subsets[static_cast<int>(s)];
        header += std::string("\t") + mode_tag(m.mode) + "_" + subset_tag(s) + "_" + metric;
        const double v = metric[0] == 'f' ? prf.f1 : metric[0] == 'p' ? prf.precision : prf.recall;
        row += '\t' + format_double(v);
      }
    }
  }
  for (const auto& m : report.modes) {
    header += std::string("\t") + mode_tag(m.mode) + "_threshold_mean";
    row += '\t' + format_double(m.stats.mean);
  }
  return header + '\n' + row + '\n';
}

}  // namespace kbcq
