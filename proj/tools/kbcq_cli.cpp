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

// kbcq command-line front end: build-dataset, train, evaluate.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kbcq/kbcq.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(kbcq_status st, const std::string& what) {
  if (st != KBCQ_OK) {
    throw CliError(what + ": " + kbcq_status_name(st) + ": " + kbcq_last_error());
  }
}

// RAII owners for the C handles.
template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};
using KbHandle = Handle<kbcq_kb, kbcq_kb_free>;
using DatasetHandle = Handle<kbcq_dataset, kbcq_dataset_free>;
using ModelHandle = Handle<kbcq_model, kbcq_model_free>;
using ReportHandle = Handle<kbcq_report, kbcq_report_free>;

struct Common {
  std::string workdir = ".";
  std::string config;
  std::string run_id;
  unsigned threads = 1;
  bool deterministic = false;
  bool quiet = false;

  fs::path resolve(const std::string& p) const {
    fs::path path(p);
    return path.is_absolute() ? path : fs::path(workdir) / path;
  }
};

struct BuildArgs {
  std::string train = "train.txt", valid = "valid.txt", test = "test.txt";
  std::string entity_types, relation_signatures;
  std::string out = "dataset";
  std::size_t remove_n = 1000;
  std::uint64_t seed = 0, fake_seed = 1, split_seed = 2;
  double empty_fraction = 0.25, answered_fraction = 0.5, fake_fraction = 0.25;
};

struct TrainArgs {
  std::string dataset = "dataset";
  std::string out;
  std::string model = "transe";
  std::size_t dim = 64, batch_size = 256, max_epochs = 200, patience = 50;
  double lr = 0.001;
  std::string inverse = "yes";
  std::uint64_t seed = 0;
  bool grid = false;
};

struct EvalArgs {
  std::string dataset = "dataset";
  std::string checkpoint;
  std::string thresholds = "both";
  std::string split = "test";
  std::size_t tuning_iterations = 2;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw CliError("cannot write " + path.string());
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliError("cannot create " + dir.string() + ": " + ec.message());
}

std::string fmt(double v, int prec = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

// Every option of the subcommand with its resolved value.
json resolved_config(const CLI::App& sub) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty() || names.front() == "help") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      value = res.empty() ? "true" : res.back();
    } else {
      value = opt->get_default_str();
    }
    if (opt->get_expected_max() == 0 && value.empty()) value = "false";
    cfg[names.front()] = value;
  }
  return cfg;
}

json warnings_json(std::size_t n, const char* (*get)(const void*, std::size_t), const void* h) {
  json w = json::array();
  for (std::size_t i = 0; i < n; ++i) w.push_back(get(h, i));
  return w;
}

const char* kb_warning(const void* h, std::size_t i) {
  return kbcq_kb_warning(static_cast<const kbcq_kb*>(h), i);
}
const char* ds_warning(const void* h, std::size_t i) {
  return kbcq_dataset_warning(static_cast<const kbcq_dataset*>(h), i);
}

void print_label_counts(const kbcq_dataset* ds) {
  kbcq_label_counts dev{}, test{}, total{};
  check(kbcq_dataset_counts(ds, KBCQ_SPLIT_DEV, &dev), "counting queries");
  check(kbcq_dataset_counts(ds, KBCQ_SPLIT_TEST, &test), "counting queries");
  check(kbcq_dataset_counts(ds, KBCQ_SPLIT_TOTAL, &total), "counting queries");
  auto row = [](const char* name, std::size_t head, std::size_t tail) {
    std::printf("%-10s %10zu %10zu %10zu\n", name, head, tail, head + tail);
  };
  const auto& t = total;
  std::printf("%-10s %10s %10s %10s\n", "Query set", "Head", "Tail", "Total");
  row("C", t.head[KBCQ_LABEL_C], t.tail[KBCQ_LABEL_C]);
  row("I", t.head[KBCQ_LABEL_I] + t.head[KBCQ_LABEL_N], t.tail[KBCQ_LABEL_I] + t.tail[KBCQ_LABEL_N]);
  row("N (in I)", t.head[KBCQ_LABEL_N], t.tail[KBCQ_LABEL_N]);
  row("F", t.head[KBCQ_LABEL_F], t.tail[KBCQ_LABEL_F]);

  auto sum = [](const kbcq_label_counts& c, int l) { return c.head[l] + c.tail[l]; };
  const std::size_t pool = sum(t, 0) + sum(t, 1) + sum(t, 2) + sum(t, 3);
  auto pct = [&](std::size_t n) { return pool ? 100.0 * double(n) / double(pool) : 0.0; };
  const std::size_t answered = sum(t, KBCQ_LABEL_C) + sum(t, KBCQ_LABEL_I);
  std::printf("pool %zu: answered %.1f%%, N %.1f%%, F %.1f%%, empty (N+F) %.1f%%\n", pool,
              pct(answered), pct(sum(t, KBCQ_LABEL_N)), pct(sum(t, KBCQ_LABEL_F)),
              pct(sum(t, KBCQ_LABEL_N) + sum(t, KBCQ_LABEL_F)));
  auto split_size = [&](const kbcq_label_counts& c) {
    return sum(c, 0) + sum(c, 1) + sum(c, 2) + sum(c, 3);
  };
  std::printf("dev %zu queries, test %zu queries\n", split_size(dev), split_size(test));
}

int cmd_build(const Common& common, const BuildArgs& a, const CLI::App& sub) {
  KbHandle kb;
  check(kbcq_kb_load(common.resolve(a.train).c_str(), common.resolve(a.valid).c_str(),
                     common.resolve(a.test).c_str(), kb.out()),
        "loading triples");
  const bool has_types = !a.entity_types.empty() || !a.relation_signatures.empty();
  if (has_types) {
    if (a.entity_types.empty() || a.relation_signatures.empty()) {
      throw CliError("--entity-types and --relation-signatures must be given together");
    }
    check(kbcq_kb_load_types(kb.get(), common.resolve(a.entity_types).c_str(),
                             common.resolve(a.relation_signatures).c_str()),
          "loading types");
  } else if (a.fake_fraction > 0) {
    throw CliError("a fake fraction > 0 needs --entity-types and --relation-signatures "
                   "(type-violating queries require typing); pass --fake-fraction 0 otherwise");
  }

  kbcq_build_options opt;
  kbcq_build_options_default(&opt);
  opt.remove_n = a.remove_n;
  opt.removal_seed = a.seed;
  opt.fake_seed = a.fake_seed;
  opt.split_seed = a.split_seed;
  opt.empty_fraction = a.empty_fraction;
  opt.answered_fraction = a.answered_fraction;
  opt.fake_fraction = a.fake_fraction;
  DatasetHandle ds;
  check(kbcq_dataset_build(kb.get(), &opt, ds.out()), "building dataset");

  const fs::path out = common.resolve(a.out);
  check(kbcq_dataset_write(ds.get(), out.c_str()), "writing dataset");
  DatasetHandle back;
  check(kbcq_dataset_read(out.c_str(), back.out()), "validating written dataset");
  if (std::string(kbcq_dataset_checksum(back.get())) != kbcq_dataset_checksum(ds.get())) {
    throw CliError("dataset read back from " + out.string() + " does not match");
  }

  json m;
  m["command"] = "build-dataset";
  m["config"] = resolved_config(sub);
  m["dataset_checksum"] = kbcq_dataset_checksum(ds.get());
  m["kb_warnings"] = warnings_json(kbcq_kb_warning_count(kb.get()), kb_warning, kb.get());
  m["dataset_warnings"] = warnings_json(kbcq_dataset_warning_count(ds.get()), ds_warning, ds.get());
  write_text(out / "run_manifest.json", m.dump(2) + "\n");

  if (!common.quiet) {
    std::printf("dataset written to %s\n", out.string().c_str());
    std::printf("entities retained %zu, removed %zu, relations %zu, train triples %zu\n",
                kbcq_dataset_num_retained(ds.get()), kbcq_dataset_num_removed(ds.get()),
                kbcq_dataset_num_relations(ds.get()), kbcq_dataset_num_train(ds.get()));
    print_label_counts(ds.get());
  }
  for (std::size_t i = 0; i < kbcq_kb_warning_count(kb.get()); ++i) {
    std::fprintf(stderr, "warning: %s\n", kbcq_kb_warning(kb.get(), i));
  }
  for (std::size_t i = 0; i < kbcq_dataset_warning_count(ds.get()); ++i) {
    std::fprintf(stderr, "warning: %s\n", kbcq_dataset_warning(ds.get(), i));
  }
  return 0;
}

void epoch_printer(std::size_t epoch, double train_loss, double dev_loss, int improved, void*) {
  std::printf("epoch %4zu  train %.6f  dev %.6f%s\n", epoch, train_loss, dev_loss,
              improved ? "  *" : "");
  std::fflush(stdout);
}

std::string lr_tag(double lr) {
  std::ostringstream s;
  s << lr;
  return s.str();
}

struct TrainOutcome {
  json log;
  fs::path checkpoint;
};

TrainOutcome train_one(const Common& common, const kbcq_dataset* ds, kbcq_train_config cfg,
                       const fs::path& out_dir, json config) {
  make_dirs(out_dir);
  ModelHandle model;
  const auto started = std::chrono::steady_clock::now();
  check(kbcq_train(ds, &cfg, common.quiet ? nullptr : epoch_printer, nullptr, model.out()),
        "training");
  const fs::path ck = out_dir / "checkpoint.tsv";
  check(kbcq_model_save(model.get(), ck.c_str()), "saving checkpoint");
  ModelHandle back;
  check(kbcq_model_load(ck.c_str(), back.out()), "validating checkpoint");

  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
  TrainOutcome r;
  r.log = json::parse(kbcq_model_train_log_json(model.get()));
  r.checkpoint = ck;
  write_text(out_dir / "train_log.json", r.log.dump(2) + "\n");
  json m;
  m["command"] = "train";
  m["config"] = std::move(config);
  m["dataset_checksum"] = kbcq_dataset_checksum(ds);
  m["checkpoint"] = ck.string();
  m["best_epoch"] = r.log["best_epoch"];
  m["best_dev_loss"] = r.log["best_dev_loss"];
  m["diverged"] = r.log["diverged"];
  m["wall_clock_seconds"] = elapsed.count();
  m["off_grid"] = r.log["off_grid"];
  m["assumptions"] = r.log["assumptions"];
  json warnings = json::array();
  for (const auto& note : r.log["off_grid"]) warnings.push_back("off the reference grid: " + note.get<std::string>());
  if (r.log["diverged"].get<bool>()) warnings.push_back(r.log["message"]);
  m["warnings"] = std::move(warnings);
  write_text(out_dir / "manifest.json", m.dump(2) + "\n");
  if (r.log["diverged"].get<bool>()) {
    std::fprintf(stderr, "warning: training diverged: %s\n",
                 r.log["message"].get<std::string>().c_str());
  }
  return r;
}

int cmd_train(const Common& common, const TrainArgs& a, const CLI::App& sub) {
  kbcq_train_config cfg;
  kbcq_train_config_default(&cfg);
  if (a.model == "conve") {
    throw CliError("model 'conve' is out of scope; supported: transe, distmult, complex, region");
  }
  check(kbcq_model_kind_parse(a.model.c_str(), &cfg.kind), "--model");
  cfg.dim = a.dim;
  cfg.batch_size = a.batch_size;
  cfg.learning_rate = a.lr;
  cfg.max_epochs = a.max_epochs;
  cfg.patience = a.patience;
  cfg.inverse_relations = a.inverse == "yes" ? 1 : 0;
  cfg.seed = a.seed;
  cfg.threads = common.deterministic ? 1 : common.threads;
  check(kbcq_train_config_check(&cfg), "training configuration");

  DatasetHandle ds;
  check(kbcq_dataset_read(common.resolve(a.dataset).c_str(), ds.out()), "reading dataset");

  std::string run_id = common.run_id;
  if (run_id.empty()) {
    run_id = a.model + (a.grid ? "-grid" : "-d" + std::to_string(a.dim) + "-b" +
                                               std::to_string(a.batch_size) + "-lr" +
                                               lr_tag(a.lr)) +
             "-s" + std::to_string(a.seed);
  }
  const fs::path out = common.resolve(a.out.empty() ? "models/" + run_id : a.out);
  json config = resolved_config(sub);
  config["run-id"] = run_id;

  if (!a.grid) {
    const auto r = train_one(common, ds.get(), cfg, out, config);
    if (!common.quiet) {
      std::printf("best epoch %zu, dev loss %s, checkpoint %s\n",
                  r.log["best_epoch"].get<std::size_t>(), r.log["best_dev_loss"].dump().c_str(),
                  r.checkpoint.string().c_str());
    }
    return 0;
  }

  json cells = json::array();
  std::string best_cell;
  double best_loss = 0;
  for (std::size_t dim : {64, 128}) {
    for (std::size_t batch : {256, 512, 1024}) {
      for (double lr : {0.001, 0.0001}) {
        kbcq_train_config c = cfg;
        c.dim = dim;
        c.batch_size = batch;
        c.learning_rate = lr;
        const std::string cell =
            "d" + std::to_string(dim) + "-b" + std::to_string(batch) + "-lr" + lr_tag(lr);
        json cell_cfg = config;
        cell_cfg["dim"] = std::to_string(dim);
        cell_cfg["batch-size"] = std::to_string(batch);
        cell_cfg["lr"] = lr_tag(lr);
        if (!common.quiet) std::printf("== grid cell %s\n", cell.c_str());
        const auto r = train_one(common, ds.get(), c, out / cell, cell_cfg);
        const auto& loss = r.log["best_dev_loss"];
        cells.push_back({{"cell", cell},
                         {"checkpoint", r.checkpoint.string()},
                         {"best_epoch", r.log["best_epoch"]},
                         {"best_dev_loss", loss}});
        if (loss.is_number() && (best_cell.empty() || loss.get<double>() < best_loss)) {
          best_cell = cell;
          best_loss = loss.get<double>();
        }
      }
    }
  }
  json summary;
  summary["command"] = "train --grid";
  summary["config"] = config;
  summary["cells"] = std::move(cells);
  summary["lowest_dev_loss_cell"] = best_cell;
  write_text(out / "grid.json", summary.dump(2) + "\n");
  if (!common.quiet) std::printf("grid done; lowest dev loss: %s\n", best_cell.c_str());
  return 0;
}

int cmd_evaluate(const Common& common, const EvalArgs& a, const CLI::App& sub) {
  if (a.checkpoint.empty()) throw CliError("--checkpoint is required");
  DatasetHandle ds;
  check(kbcq_dataset_read(common.resolve(a.dataset).c_str(), ds.out()), "reading dataset");
  ModelHandle model;
  check(kbcq_model_load(common.resolve(a.checkpoint).c_str(), model.out()), "loading checkpoint");

  kbcq_eval_options opt;
  kbcq_eval_options_default(&opt);
  opt.modes = a.thresholds == "global"         ? KBCQ_THRESHOLD_GLOBAL
              : a.thresholds == "per-relation" ? KBCQ_THRESHOLD_PER_RELATION
                                               : KBCQ_THRESHOLD_GLOBAL | KBCQ_THRESHOLD_PER_RELATION;
  opt.split = a.split == "dev" ? KBCQ_SPLIT_DEV : KBCQ_SPLIT_TEST;
  opt.tuning_iterations = a.tuning_iterations;
  opt.threads = common.threads;
  ReportHandle report;
  check(kbcq_evaluate(model.get(), ds.get(), &opt, report.out()), "evaluating");

  const std::string kind = kbcq_model_kind_name(kbcq_model_get_kind(model.get()));
  const std::string run_id =
      common.run_id.empty()
          ? kind + "-d" + std::to_string(kbcq_model_dim(model.get())) + "-" + a.split
          : common.run_id;
  const fs::path dir = common.resolve("reports") / run_id;
  make_dirs(dir);
  write_text(dir / "report.json", kbcq_report_json(report.get()));
  write_text(dir / "report.tsv", kbcq_report_tsv(report.get()));
  json m;
  m["command"] = "evaluate";
  m["config"] = resolved_config(sub);
  m["config"]["run-id"] = run_id;
  m["dataset_checksum"] = kbcq_dataset_checksum(ds.get());
  m["outputs"] = {(dir / "report.json").string(), (dir / "report.tsv").string()};
  m["warnings"] = json::array();
  write_text(dir / "manifest.json", m.dump(2) + "\n");

  if (!common.quiet) {
    std::printf("%s d=%zu on %s: MRR %s\n", kind.c_str(), kbcq_model_dim(model.get()),
                a.split.c_str(), fmt(kbcq_report_mrr(report.get())).c_str());
    std::printf("%-14s %7s %7s %7s %7s %9s\n", "F1", "full", "C", "C+F", "I", "dev full");
    for (unsigned mode : {unsigned(KBCQ_THRESHOLD_GLOBAL), unsigned(KBCQ_THRESHOLD_PER_RELATION)}) {
      if (!(opt.modes & mode)) continue;
      std::printf("%-14s", mode == KBCQ_THRESHOLD_GLOBAL ? "global" : "per-relation");
      for (int s = 0; s < 4; ++s) {
        double f1 = 0;
        check(kbcq_report_metrics(report.get(), mode, static_cast<kbcq_subset>(s), nullptr,
                                  nullptr, &f1),
              "reading report");
        std::printf(" %7s", fmt(f1).c_str());
      }
      double dev = 0;
      check(kbcq_report_dev_f1(report.get(), mode, &dev), "reading report");
      std::printf(" %9s\n", fmt(dev).c_str());
    }
    std::printf("report written to %s\n", dir.string().c_str());
  }
  return 0;
}

bool truthy(const std::string& v, bool& out) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return out = true, true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return out = false, true;
  return false;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Turns key=value lines into option arguments for `sub`; unknown keys fail.
std::vector<std::string> config_args(const fs::path& path, CLI::App& sub) {
  std::ifstream in(path);
  if (!in) throw CliError("cannot open config file " + path.string());
  std::vector<std::string> args;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw CliError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const CLI::Option* opt = sub.get_option_no_throw("--" + key);
    if (key == "config" || key == "help" || opt == nullptr) {
      throw CliError(path.string() + ":" + std::to_string(lineno) + ": unknown key '" + key +
                     "' for " + sub.get_name());
    }
    if (opt->get_expected_max() == 0) {
      bool on = false;
      if (!truthy(value, on)) {
        throw CliError(path.string() + ":" + std::to_string(lineno) + ": '" + key +
                       "' expects a boolean");
      }
      if (on) args.push_back("--" + key);
    } else {
      args.push_back("--" + key);
      args.push_back(value);
    }
  }
  return args;
}

void add_common(CLI::App& sub, Common& c) {
  sub.add_option("--workdir", c.workdir, "Base directory for relative paths");
  sub.add_option("--config", c.config, "key=value config file; flags override it");
  sub.add_option("--run-id", c.run_id, "Name of the output run");
  sub.add_option("--threads", c.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  sub.add_flag("--deterministic", c.deterministic, "Serialize floating-point reductions");
  sub.add_flag("--quiet", c.quiet, "Suppress progress output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kbcq: knowledge-base completion as query answering"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(
      CLI::MultiOptionPolicy::TakeLast);

  Common common;
  BuildArgs build;
  TrainArgs train;
  EvalArgs eval;

  auto* b = app.add_subcommand("build-dataset", "Build a query dataset by entity removal");
  add_common(*b, common);
  b->add_option("--train", build.train, "Training triples (TSV)");
  b->add_option("--valid", build.valid, "Validation triples (TSV)");
  b->add_option("--test", build.test, "Test triples (TSV)");
  b->add_option("--entity-types", build.entity_types, "entity<TAB>type lines");
  b->add_option("--relation-signatures", build.relation_signatures,
                "relation<TAB>domain<TAB>range lines");
  b->add_option("--out", build.out, "Dataset output directory");
  b->add_option("--remove-n", build.remove_n, "Number of entities to remove");
  b->add_option("--seed", build.seed, "Entity removal seed");
  b->add_option("--fake-seed", build.fake_seed, "Fake query sampling seed");
  b->add_option("--split-seed", build.split_seed, "Dev/test split seed");
  b->add_option("--empty-fraction", build.empty_fraction, "Target share of N queries")
      ->check(CLI::Range(0.0, 1.0));
  b->add_option("--answered-fraction", build.answered_fraction, "Target share of answered queries")
      ->check(CLI::Range(0.0, 1.0));
  b->add_option("--fake-fraction", build.fake_fraction, "Target share of F queries")
      ->check(CLI::Range(0.0, 1.0));

  auto* t = app.add_subcommand("train", "Train an embedding model");
  add_common(*t, common);
  t->add_option("--dataset", train.dataset, "Dataset directory");
  t->add_option("--out", train.out, "Output directory (default models/<run-id>)");
  t->add_option("--model", train.model, "transe, distmult, complex or region");
  t->add_option("--dim", train.dim, "Embedding dimension");
  t->add_option("--batch-size", train.batch_size, "Examples per batch");
  t->add_option("--lr", train.lr, "Adam learning rate");
  t->add_option("--max-epochs", train.max_epochs, "Epoch limit");
  t->add_option("--patience", train.patience, "Early stopping patience in epochs");
  t->add_option("--inverse-relations", train.inverse, "yes or no (no is TransE only)")
      ->check(CLI::IsMember({"yes", "no"}));
  t->add_option("--seed", train.seed, "Initialization and shuffling seed");
  t->add_flag("--grid", train.grid, "Train every cell of the dim x batch x lr grid");

  auto* e = app.add_subcommand("evaluate", "Tune thresholds on dev and evaluate");
  add_common(*e, common);
  e->add_option("--dataset", eval.dataset, "Dataset directory");
  e->add_option("--checkpoint", eval.checkpoint, "Model checkpoint");
  e->add_option("--thresholds", eval.thresholds, "global, per-relation or both")
      ->check(CLI::IsMember({"global", "per-relation", "both"}));
  e->add_option("--split", eval.split, "dev or test")->check(CLI::IsMember({"dev", "test"}));
  e->add_option("--tuning-iterations", eval.tuning_iterations, "Per-relation tuning passes");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    // A config file contributes arguments ahead of the command-line flags so
    // the flags win.
    if (!args.empty()) {
      CLI::App* sub = app.get_subcommand_no_throw(args[0]);
      std::string config;
      for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
      }
      if (sub && !config.empty()) {
        auto extra = config_args(config, *sub);
        args.insert(args.begin() + 1, extra.begin(), extra.end());
      }
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& err) {
    return app.exit(err);
  } catch (const CliError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  }

  try {
    if (*b) return cmd_build(common, build, *b);
    if (*t) return cmd_train(common, train, *t);
    if (*e) return cmd_evaluate(common, eval, *e);
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 1;
}
