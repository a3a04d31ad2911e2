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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "viewx/augment.hpp"
#include "viewx/exchange.hpp"
#include "viewx/gcn.hpp"
#include "viewx/graph.hpp"

namespace viewx {

enum class Method { Backbone, FT, Ensemble, EnsembleFT, AKE };

std::string_view to_string(Method m);
Method parse_method(std::string_view s);

struct ExperimentConfig {
  // Architecture; input and output widths come from the graph.
  int hidden = 16;
  int depth = 2;
  double dropout = 0.5;
  bool normalize_features = true;  // row-normalize features after loading

  TrainConfig train;
  AugmentSpec augment;
  ExchangeConfig exchange;
  int num_views = 4;  // K
  /// AKE retraining input: the original graph (true) or each model's own view.
  bool retrain_on_original = true;
  std::vector<std::uint64_t> seeds = {0};
  Method method = Method::AKE;

  ModelSpec model_spec(const Graph& g) const;
  void validate() const;
  /// Stable hash of every field, for provenance in results.
  std::string fingerprint() const;
};

struct SeedResult {
  std::uint64_t seed = 0;
  double val_accuracy = 0.0;
  double test_accuracy = 0.0;
  int epochs_used = 0;    // epochs actually run by the reported model
  int epoch_budget = 0;   // epochs allotted to each model
  int reported_view = 0;  // which view's model is reported (FT best-of)
  double wall_ms = 0.0;
  std::vector<ExchangeEvent> events;
};

struct ExperimentResult {
  Method method = Method::AKE;
  std::optional<ExchangeStrategy> strategy;
  std::vector<SeedResult> runs;
  double mean = 0.0;  // test accuracy
  double stddev = 0.0;
  double wall_ms = 0.0;
  std::string fingerprint;

  void summarize();
};

/// Mean and sample standard deviation (0 for fewer than two values).
std::pair<double, double> mean_std(std::span<const double> values);

/// Per-node majority vote over predicted classes; ties go to the lowest class.
std::vector<int> majority_vote(const std::vector<std::vector<int>>& predictions, int num_classes);

/// Seed derivation shared by all methods so that, for one seed, every method
/// sees the same views, initial weights and dropout streams.
struct SeedPlan {
  std::uint64_t seed;

  explicit SeedPlan(std::uint64_t s) : seed(s) {}
  std::uint64_t augment_seed() const { return mix_seed(seed, 1); }
  std::uint64_t exchange_seed() const { return mix_seed(seed, 2); }
  std::uint64_t fewshot_seed() const { return mix_seed(seed, 3); }
  std::uint64_t init_seed(int model) const { return mix_seed(seed, 100 + model); }
  std::uint64_t train_seed(int model, int phase) const {
    return mix_seed(seed, 1000 + 100 * phase + model);
  }
};

/// Individual training, exchange schedule, retraining; reports the first model.
ExperimentResult run_ake(const Graph& graph, const ExperimentConfig& cfg);
/// A single model trained on the original graph.
ExperimentResult run_backbone(const Graph& graph, const ExperimentConfig& cfg);
/// One model per view, trained then retrained on its view; reports the view
/// with the best validation accuracy.
ExperimentResult run_ft(const Graph& graph, const ExperimentConfig& cfg);
/// Majority vote of the per-view models, optionally retrained (EnsembleFT).
ExperimentResult run_ensemble(const Graph& graph, const ExperimentConfig& cfg, bool further_train);
/// Dispatch on cfg.method.
ExperimentResult run_method(const Graph& graph, const ExperimentConfig& cfg);

/// run_ake once per strategy with shared seeds.
std::vector<ExperimentResult> ablation_sweep(const Graph& graph, const ExperimentConfig& cfg,
                                             const std::vector<ExchangeStrategy>& strategies);

struct PairedPoint {
  int value = 0;  // depth or labels per class
  ExperimentResult backbone;
  ExperimentResult ake;
};

/// Backbone vs AKE at each depth (hidden width unchanged).
std::vector<PairedPoint> depth_sweep(const Graph& graph, const ExperimentConfig& cfg,
                                     const std::vector<int>& depths);
/// Backbone vs AKE with per-seed resampled train masks of `budget` nodes per class.
std::vector<PairedPoint> fewshot_sweep(const Graph& graph, const ExperimentConfig& cfg,
                                       const std::vector<int>& labels_per_class);

/// The graph with its train mask replaced by `per_class` nodes of every class,
/// drawn without replacement from labeled nodes outside val/test.
/// Throws InsufficientLabeledNodes.
Graph resample_train_split(const Graph& graph, int per_class, std::uint64_t seed);

/// Worker cap from AKE_THREADS (0 or unset = hardware concurrency).
int worker_count();
/// Runs fn(i) for i in [0, n) on up to worker_count() threads.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace viewx
