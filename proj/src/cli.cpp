/* Copyright 2026 The viewx Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "viewx/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "viewx/error.hpp"
#include "viewx/io.hpp"

namespace viewx {
namespace fs = std::filesystem;
namespace {

template <typename T>
std::vector<T> split_csv(const std::string& text, const char* flag) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      long long v = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<T>(v));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::UsageError, std::string(flag) + ": '" + item + "' is not an integer");
    }
  }
  if (out.empty()) throw Error(ErrorKind::UsageError, std::string(flag) + ": empty list");
  return out;
}

/// A bare integer N means seeds 0..N-1; a comma list names the seeds.
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  if (text.find(',') == std::string::npos) {
    const auto n = split_csv<long long>(text, "--seeds").front();
    if (n < 1) throw Error(ErrorKind::UsageError, "--seeds: count must be >= 1");
    std::vector<std::uint64_t> seeds(n);
    for (long long i = 0; i < n; ++i) seeds[i] = static_cast<std::uint64_t>(i);
    return seeds;
  }
  return split_csv<std::uint64_t>(text, "--seeds");
}

struct Options {
  std::string bundle;
  std::string config;
  std::string seeds;
  std::string out = "results";
  std::string strategies;
  std::string depths = "2,4,6,8,10";
  std::string labels_per_class = "1,2,3,5,10,20";
};

struct Run {
  ExperimentConfig cfg;
  Graph graph;
  std::string dataset;
};

Run prepare(const Options& opt) {
  Run run;
  if (!opt.config.empty()) run.cfg = load_config(opt.config);
  if (!opt.seeds.empty()) run.cfg.seeds = parse_seeds(opt.seeds);
  BundleMeta meta;
  run.graph = load_bundle(opt.bundle, &meta);
  if (run.cfg.normalize_features) run.graph = row_normalize_features(std::move(run.graph));
  run.dataset = meta.name;
  return run;
}

void append_events(const ExperimentResult& r, std::vector<ExchangeEvent>& events) {
  for (const SeedResult& s : r.runs) events.insert(events.end(), s.events.begin(), s.events.end());
}

void emit(const Options& opt, const Run& run, const std::vector<ResultsRow>& rows,
          const std::vector<ExchangeEvent>& events, std::ostream& out) {
  const fs::path dir(opt.out);
  fs::create_directories(dir);
  write_results(rows, dir / "results.csv");
  std::ofstream cfg_out(dir / "config.json");
  cfg_out << config_to_json(run.cfg).dump(2) << "\n";
  if (!events.empty()) write_trace(events, dir / "trace.jsonl");
  const std::string text = format_results(rows);
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    if (!line.empty() && line[0] == '#') out << line << "\n";
  }
  out << "wrote " << (dir / "results.csv").string() << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-view GNN training with adaptive kernel exchange", "viewx"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--bundle", opt.bundle, "graph bundle directory")->required();
    sub->add_option("--config", opt.config, "experiment config JSON");
    sub->add_option("--seeds", opt.seeds, "seed count N (seeds 0..N-1) or comma list");
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
  };
  auto* train = app.add_subcommand("train", "train the method named in the config (default: single GCN)");
  auto* ake = app.add_subcommand("ake", "multi-view training with kernel exchange");
  auto* ablate = app.add_subcommand("ablate", "compare exchange strategies under shared seeds");
  auto* depth = app.add_subcommand("depth", "backbone vs ake across depths");
  auto* fewshot = app.add_subcommand("fewshot", "backbone vs ake with few labels per class");
  auto* baselines = app.add_subcommand("baselines", "backbone, ft, ensemble, ensemble-ft and ake");
  for (auto* sub : {train, ake, ablate, depth, fewshot, baselines}) add_common(sub);
  ablate->add_option("--strategies", opt.strategies, "comma list of strategies (default: all)");
  depth->add_option("--depths", opt.depths, "comma list of depths")->capture_default_str();
  fewshot->add_option("--labels-per-class", opt.labels_per_class, "comma list of budgets")
      ->capture_default_str();

  std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "UsageError: " << e.what() << "\n" << "run with --help for usage\n";
    return 2;
  }

  try {
    Run run = prepare(opt);
    const int depth_value = run.cfg.depth;
    std::vector<ResultsRow> rows;
    std::vector<ExchangeEvent> events;
    auto add = [&](const ExperimentResult& r, const std::string& id, int d, int lpc) {
      auto more = to_rows(r, id, run.dataset, d, lpc);
      rows.insert(rows.end(), more.begin(), more.end());
      append_events(r, events);
    };
    const int full_budget = 0;  // 0 = the bundle's own split

    if (train->parsed()) {
      ExperimentConfig cfg = run.cfg;
      if (opt.config.empty()) cfg.method = Method::Backbone;
      run.cfg = cfg;
      add(run_method(run.graph, cfg), "train", depth_value, full_budget);
    } else if (ake->parsed()) {
      run.cfg.method = Method::AKE;
      add(run_ake(run.graph, run.cfg), "ake", depth_value, full_budget);
    } else if (baselines->parsed()) {
      for (Method m : {Method::Backbone, Method::FT, Method::Ensemble, Method::EnsembleFT, Method::AKE}) {
        ExperimentConfig cfg = run.cfg;
        cfg.method = m;
        add(run_method(run.graph, cfg), "baselines", depth_value, full_budget);
      }
    } else if (ablate->parsed()) {
      std::vector<ExchangeStrategy> strategies;
      if (opt.strategies.empty()) {
        strategies = all_strategies();
      } else {
        std::stringstream ss(opt.strategies);
        for (std::string s; std::getline(ss, s, ',');) {
          if (!s.empty()) strategies.push_back(parse_strategy(s));
        }
      }
      for (const auto& r : ablation_sweep(run.graph, run.cfg, strategies)) {
        add(r, "ablate", depth_value, full_budget);
      }
    } else if (depth->parsed()) {
      for (const auto& p : depth_sweep(run.graph, run.cfg, split_csv<int>(opt.depths, "--depths"))) {
        add(p.backbone, "depth", p.value, full_budget);
        add(p.ake, "depth", p.value, full_budget);
      }
    } else if (fewshot->parsed()) {
      const auto budgets = split_csv<int>(opt.labels_per_class, "--labels-per-class");
      for (const auto& p : fewshot_sweep(run.graph, run.cfg, budgets)) {
        add(p.backbone, "fewshot", depth_value, p.value);
        add(p.ake, "fewshot", depth_value, p.value);
      }
    }
    emit(opt, run, rows, events, out);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.kind() == ErrorKind::UsageError ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace viewx
