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

#include <limits>
#include <string>

#include "viewx/error.hpp"
#include "viewx/gcn.hpp"

namespace viewx {

std::string_view to_string(ToleranceMetric m) {
  switch (m) {
    case ToleranceMetric::Loss: return "loss";
    case ToleranceMetric::Accuracy: return "accuracy";
    case ToleranceMetric::Both: return "both";
  }
  return "unknown";
}

ToleranceMetric parse_tolerance_metric(std::string_view s) {
  if (s == "loss") return ToleranceMetric::Loss;
  if (s == "accuracy") return ToleranceMetric::Accuracy;
  if (s == "both") return ToleranceMetric::Both;
  throw Error(ErrorKind::InvalidArgument, "unknown tolerance metric '" + std::string(s) + "'");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw Error(ErrorKind::InvalidArgument, "epochs must be >= 1");
  if (!(lr > 0.0)) throw Error(ErrorKind::InvalidArgument, "learning rate must be positive");
  if (weight_decay < 0.0) throw Error(ErrorKind::InvalidArgument, "weight decay must be >= 0");
  for (double wd : layer_weight_decay) {
    if (wd < 0.0) throw Error(ErrorKind::InvalidArgument, "weight decay must be >= 0");
  }
  if (tolerance_num < 0) throw Error(ErrorKind::InvalidArgument, "tolerance_num must be >= 0");
  if (dropout_rate && !(*dropout_rate >= 0.0 && *dropout_rate < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "dropout rate must be in [0, 1)");
  }
}

std::vector<double> TrainConfig::resolved_weight_decay(int num_layers) const {
  if (!layer_weight_decay.empty()) {
    if (static_cast<int>(layer_weight_decay.size()) != num_layers) {
      throw Error(ErrorKind::ShapeMismatch, "layer_weight_decay has " +
                                                std::to_string(layer_weight_decay.size()) +
                                                " entries for a " + std::to_string(num_layers) +
                                                "-layer model");
    }
    return layer_weight_decay;
  }
  std::vector<double> out(num_layers, decay_first_layer_only ? 0.0 : weight_decay);
  if (decay_first_layer_only && num_layers > 0) out[0] = weight_decay;
  return out;
}

TrainResult train(GnnModel model, const GraphView& view, const Graph& graph, const TrainConfig& cfg) {
  const GraphView eval_view = identity_view(graph);
  return train(std::move(model), view, eval_view, cfg);
}

TrainResult train(GnnModel model, const GraphView& view, const GraphView& eval_view,
                  const TrainConfig& cfg) {
  cfg.validate();
  const Graph& graph = *eval_view.base;
  if (cfg.dropout_rate && *cfg.dropout_rate != model.spec().dropout_rate) {
    ModelSpec spec = model.spec();
    spec.dropout_rate = *cfg.dropout_rate;
    model = GnnModel(spec, model.layers(), model.init_seed());
  }
  const std::vector<double> decay = cfg.resolved_weight_decay(model.num_layers());

  Rng rng(cfg.seed);
  AdamState state = make_adam_state(model);
  TrainHistory history;
  GnnModel best = model;
  double best_loss = std::numeric_limits<double>::infinity();
  double best_acc = -1.0;
  int loss_stall = 0;
  int acc_stall = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const ForwardCache cache = forward(model, view, true, rng);
    history.train_loss.push_back(masked_cross_entropy(cache.logits, graph.labels, graph.train_mask));
    const Gradients grads = backward(cache, graph.labels, graph.train_mask);
    adam_step(model, grads, state, cfg.lr, decay, epoch);

    const Matrix logits = predict(model, eval_view);
    const std::vector<int> pred = argmax_rows(logits);
    const double val_loss = masked_cross_entropy(logits, graph.labels, graph.val_mask);
    const double val_acc = accuracy(pred, graph.labels, graph.val_mask);
    history.train_accuracy.push_back(accuracy(pred, graph.labels, graph.train_mask));
    history.val_loss.push_back(val_loss);
    history.val_accuracy.push_back(val_acc);
    history.stop_epoch = epoch;

    const bool loss_improved = val_loss < best_loss;
    const bool acc_improved = val_acc > best_acc;
    if (loss_improved) best_loss = val_loss;
    if (acc_improved) best_acc = val_acc;
    loss_stall = loss_improved ? 0 : loss_stall + 1;
    acc_stall = acc_improved ? 0 : acc_stall + 1;

    bool snapshot = false;
    int stall = 0;
    switch (cfg.tolerance_metric) {
      case ToleranceMetric::Loss:
        snapshot = loss_improved;
        stall = loss_stall;
        break;
      case ToleranceMetric::Accuracy:
        snapshot = acc_improved;
        stall = acc_stall;
        break;
      case ToleranceMetric::Both:
        snapshot = loss_improved || acc_improved;
        stall = std::max(loss_stall, acc_stall);
        break;
    }
    if (snapshot) {
      best = model;
      history.best_epoch = epoch;
    }
    if (cfg.tolerance_num > 0 && stall >= cfg.tolerance_num) {
      history.stopped_early = epoch < cfg.epochs;
      break;
    }
  }
  return {std::move(best), std::move(history)};
}

}  // namespace viewx
