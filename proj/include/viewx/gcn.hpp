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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "viewx/augment.hpp"
#include "viewx/graph.hpp"
#include "viewx/random.hpp"

namespace viewx {

/// Layer widths [in, hidden..., classes]. ReLU between layers, none after the last.
struct ModelSpec {
  std::vector<int> layer_sizes;
  double dropout_rate = 0.5;

  int num_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  void validate() const;

  /// `depth` graph-convolution layers, all hidden layers `hidden` wide.
  static ModelSpec gcn(int in, int hidden, int classes, int depth = 2, double dropout = 0.5);

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// One graph-convolution layer. Output channel j is weight column j plus bias j.
struct LayerParams {
  Matrix weight;  // C_in x C_out
  Vector bias;    // C_out

  friend bool operator==(const LayerParams& a, const LayerParams& b) {
    return a.weight == b.weight && a.bias == b.bias;
  }
};

/// Parameters of a GCN. Every mutation goes through mutable_layer(), which
/// stamps the model so that forward caches taken earlier are rejected.
class GnnModel {
 public:
  GnnModel() = default;
  GnnModel(ModelSpec spec, std::vector<LayerParams> layers, std::uint64_t init_seed);

  const ModelSpec& spec() const { return spec_; }
  std::uint64_t init_seed() const { return init_seed_; }
  int num_layers() const { return static_cast<int>(layers_.size()); }
  const LayerParams& layer(int l) const { return layers_.at(l); }
  const std::vector<LayerParams>& layers() const { return layers_; }
  LayerParams& mutable_layer(int l);
  std::uint64_t stamp() const { return stamp_; }

  /// Total number of scalar parameters.
  Eigen::Index parameter_count() const;

  friend bool operator==(const GnnModel& a, const GnnModel& b) {
    return a.spec_ == b.spec_ && a.layers_ == b.layers_;
  }

 private:
  ModelSpec spec_;
  std::vector<LayerParams> layers_;
  std::uint64_t init_seed_ = 0;
  std::uint64_t stamp_ = 0;
};

/// Glorot-uniform weights in +-sqrt(6 / (C_in + C_out)), zero biases.
GnnModel init_model(const ModelSpec& spec, std::uint64_t seed);
LayerParams init_layer(int in, int out, Rng& rng);

/// Activations kept by forward() for backward().
struct ForwardCache {
  const GnnModel* model = nullptr;
  std::uint64_t stamp = 0;
  const GraphView* view = nullptr;
  SparseMatrix first_input;          // dropped-out input features
  std::vector<Matrix> inputs;        // dropped-out inputs of layers 1..L-1 (index 0 unused)
  std::vector<Matrix> dropout_scale; // 0 or 1/(1-p) per entry, layers 1..L-1, train mode only
  std::vector<Matrix> pre_activation;
  Matrix logits;
  bool train_mode = false;
};

/// H_{l+1} = relu(A_hat * dropout(H_l) * W_l + b_l), no relu on the last layer.
/// Dropout is active only in train_mode. Throws ShapeMismatch.
ForwardCache forward(const GnnModel& model, const GraphView& view, bool train_mode, Rng& rng);
/// Eval-mode logits.
Matrix predict(const GnnModel& model, const GraphView& view);

/// Row-wise softmax.
Matrix softmax(const Eigen::Ref<const Matrix>& logits);

/// Mean over masked nodes of -log softmax(logits_u)[y_u]. Throws EmptyMask.
double masked_cross_entropy(const Eigen::Ref<const Matrix>& logits, std::span<const int> labels,
                            const NodeMask& mask);

using Gradients = std::vector<LayerParams>;

/// Exact gradient of masked_cross_entropy with respect to every weight and bias.
/// Throws StaleCache if the model changed since the forward pass.
Gradients backward(const ForwardCache& cache, std::span<const int> labels, const NodeMask& mask);

struct AdamState {
  Gradients first_moment;
  Gradients second_moment;
  int step = 0;
};

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEpsilon = 1e-8;

AdamState make_adam_state(const GnnModel& model);

/// One Adam update at step t >= 1. The L2 term weight_decay[l] * theta is added
/// to the gradient before the moments are updated.
void adam_step(GnnModel& model, const Gradients& grads, AdamState& state, double lr,
               std::span<const double> layer_weight_decay, int t);

enum class ToleranceMetric { Loss, Accuracy, Both };
std::string_view to_string(ToleranceMetric m);
ToleranceMetric parse_tolerance_metric(std::string_view s);

struct TrainConfig {
  int epochs = 200;
  double lr = 0.01;
  double weight_decay = 5e-4;
  /// Per-layer weight decay; overrides weight_decay when non-empty.
  std::vector<double> layer_weight_decay;
  /// Decay only the first layer (the reference GCN recipe) when no per-layer list is given.
  bool decay_first_layer_only = true;
  ToleranceMetric tolerance_metric = ToleranceMetric::Loss;
  int tolerance_num = 10;  // 0 disables early stopping
  std::optional<double> dropout_rate;  // falls back to the model spec
  std::uint64_t seed = 0;

  void validate() const;
  std::vector<double> resolved_weight_decay(int num_layers) const;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> train_accuracy;
  std::vector<double> val_loss;
  std::vector<double> val_accuracy;
  int stop_epoch = 0;  // epochs actually run
  int best_epoch = 0;  // 1-based epoch whose parameters were returned
  bool stopped_early = false;
};

struct TrainResult {
  GnnModel model;
  TrainHistory history;
};

/// Full-batch training on `view`, validated on the un-augmented `graph`.
/// Returns the parameters of the best validation epoch.
TrainResult train(GnnModel model, const GraphView& view, const Graph& graph,
                  const TrainConfig& cfg);
/// Same, reusing a prebuilt identity view of `graph` for validation.
TrainResult train(GnnModel model, const GraphView& view, const GraphView& eval_view,
                  const TrainConfig& cfg);

/// Argmax per row, ties to the lowest class id.
std::vector<int> argmax_rows(const Eigen::Ref<const Matrix>& logits);
/// Fraction of masked nodes whose predicted class equals the label. Throws EmptyMask.
double accuracy(std::span<const int> predictions, std::span<const int> labels, const NodeMask& mask);
double evaluate(const GnnModel& model, const GraphView& eval_view, const NodeMask& mask);
double evaluate(const GnnModel& model, const Graph& graph, const NodeMask& mask);

}  // namespace viewx
