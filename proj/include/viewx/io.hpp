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

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "viewx/exchange.hpp"
#include "viewx/graph.hpp"
#include "viewx/pipeline.hpp"

namespace viewx {

struct BundleMeta {
  std::string name;
  int num_nodes = 0;
  int num_features = 0;
  int num_classes = 0;
};

/// Reads meta.json, edges.tsv, features.tsv (sparse node/feature/value),
/// labels.tsv and split.json. Throws MissingFile, CountMismatch, ParseError
/// (naming file and line) and the build_graph errors, also with file and line.
Graph load_bundle(const std::filesystem::path& dir, BundleMeta* meta = nullptr);

/// Writes `g` in the bundle layout; load_bundle reads it back exactly.
void save_bundle(const Graph& g, const std::string& name, const std::filesystem::path& dir);

/// ExperimentConfig <-> JSON. Missing fields keep their defaults, so `{}`
/// gives the 2-layer Cora GCN setting. Unknown fields are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ResultsRow {
  std::string run_id;
  std::string dataset;
  std::string method;
  std::string strategy;
  std::uint64_t seed = 0;
  int depth = 0;
  int labels_per_class = 0;
  int epochs_used = 0;
  double val_accuracy = 0.0;
  double test_accuracy = 0.0;
  double wall_ms = 0.0;

  friend bool operator==(const ResultsRow&, const ResultsRow&) = default;
};

inline constexpr const char* kResultsHeader =
    "run_id,dataset,method,strategy,seed,depth,labels_per_class,epochs_used,val_accuracy,"
    "test_accuracy,wall_ms";

/// One row per seed of `result`.
std::vector<ResultsRow> to_rows(const ExperimentResult& result, const std::string& run_id,
                                const std::string& dataset, int depth, int labels_per_class);

/// CSV with the fixed header, accuracies to 4 decimals, then `#` summary lines
/// (mean and std of test accuracy per method/strategy/depth/budget group).
/// Throws InvalidArgument on no rows, IoError on write failure.
void write_results(const std::vector<ResultsRow>& rows, const std::filesystem::path& path);
std::string format_results(const std::vector<ResultsRow>& rows);
/// Parses the CSV written above, skipping `#` lines.
std::vector<ResultsRow> parse_results(const std::string& text);

/// Line-delimited JSON exchange trace.
void write_trace(const std::vector<ExchangeEvent>& events, const std::filesystem::path& path);

}  // namespace viewx
