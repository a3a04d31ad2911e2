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

#include "viewx/gcn.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "viewx/error.hpp"

namespace viewx {
namespace {

std::uint64_t next_stamp() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

void check_mask(const NodeMask& mask, std::size_t n, std::size_t labels) {
  if (mask.size() != n || labels != n) {
    throw Error(ErrorKind::ShapeMismatch, "mask/labels length does not match node count");
  }
}

}  // namespace

void ModelSpec::validate() const {
  if (layer_sizes.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "a model needs at least one layer");
  }
  for (int c : layer_sizes) {
    if (c < 1) throw Error(ErrorKind::InvalidArgument, "layer widths must be positive");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "dropout rate must be in [0, 1)");
  }
}

ModelSpec ModelSpec::gcn(int in, int hidden, int classes, int depth, double dropout) {
  ModelSpec spec;
  spec.layer_sizes.push_back(in);
  for (int l = 1; l < depth; ++l) spec.layer_sizes.push_back(hidden);
  spec.layer_sizes.push_back(classes);
  spec.dropout_rate = dropout;
  return spec;
}

GnnModel::GnnModel(ModelSpec spec, std::vector<LayerParams> layers, std::uint64_t init_seed)
    : spec_(std::move(spec)), layers_(std::move(layers)), init_seed_(init_seed), stamp_(next_stamp()) {
  spec_.validate();
  if (static_cast<int>(layers_.size()) != spec_.num_layers()) {
    throw Error(ErrorKind::ShapeMismatch, "layer count does not match spec");
  }
  for (int l = 0; l < num_layers(); ++l) {
    const auto& p = layers_[l];
    if (p.weight.rows() != spec_.layer_sizes[l] || p.weight.cols() != spec_.layer_sizes[l + 1] ||
        p.bias.size() != spec_.layer_sizes[l + 1]) {
      throw Error(ErrorKind::ShapeMismatch, "layer " + std::to_string(l) + " shape does not match spec");
    }
  }
}

LayerParams& GnnModel::mutable_layer(int l) {
  stamp_ = next_stamp();
  return layers_.at(l);
}

Eigen::Index GnnModel::parameter_count() const {
  Eigen::Index count = 0;
  for (const auto& p : layers_) count += p.weight.size() + p.bias.size();
  return count;
}

LayerParams init_layer(int in, int out, Rng& rng) {
  const double bound = std::sqrt(6.0 / (in + out));
  LayerParams p;
  p.weight.resize(in, out);
  // Column-major fill order is part of the reproducibility contract.
  for (Eigen::Index j = 0; j < out; ++j) {
    for (Eigen::Index i = 0; i < in; ++i) p.weight(i, j) = (2.0 * rng.uniform() - 1.0) * bound;
  }
  p.bias = Vector::Zero(out);
  return p;
}

GnnModel init_model(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  std::vector<LayerParams> layers;
  for (int l = 0; l < spec.num_layers(); ++l) {
    layers.push_back(init_layer(spec.layer_sizes[l], spec.layer_sizes[l + 1], rng));
  }
  return GnnModel(spec, std::move(layers), seed);
}

ForwardCache forward(const GnnModel& model, const GraphView& view, bool train_mode, Rng& rng) {
  const ModelSpec& spec = model.spec();
  if (view.num_features() != spec.layer_sizes.front()) {
    throw Error(ErrorKind::ShapeMismatch, "view has " + std::to_string(view.num_features()) +
                                              " features, model expects " +
                                              std::to_string(spec.layer_sizes.front()));
  }
  const double p = spec.dropout_rate;
  const bool drop = train_mode && p > 0.0;
  const double keep_scale = drop ? 1.0 / (1.0 - p) : 1.0;
  const int layers = model.num_layers();

  ForwardCache cache;
  cache.model = &model;
  cache.stamp = model.stamp();
  cache.view = &view;
  cache.train_mode = train_mode;
  cache.inputs.resize(layers);
  cache.dropout_scale.resize(layers);
  cache.pre_activation.resize(layers);

  cache.first_input = view.sparse_features;
  if (drop) {
    Scalar* values = cache.first_input.valuePtr();
    for (Eigen::Index k = 0; k < cache.first_input.nonZeros(); ++k) {
      values[k] = rng.bernoulli(p) ? 0.0 : values[k] * keep_scale;
    }
  }

  Matrix h;
  for (int l = 0; l < layers; ++l) {
    const LayerParams& params = model.layer(l);
    Matrix transformed;
    if (l == 0) {
      transformed = cache.first_input * params.weight;
    } else {
      if (drop) {
        Matrix scale(h.rows(), h.cols());
        for (Eigen::Index j = 0; j < scale.cols(); ++j) {
          for (Eigen::Index i = 0; i < scale.rows(); ++i) {
            scale(i, j) = rng.bernoulli(p) ? 0.0 : keep_scale;
          }
        }
        h = h.cwiseProduct(scale);
        cache.dropout_scale[l] = std::move(scale);
      }
      transformed = h * params.weight;
      cache.inputs[l] = h;
    }
    Matrix z = view.adjacency.matrix() * transformed;
    z.rowwise() += params.bias.transpose();
    if (l + 1 < layers) {
      h = z.cwiseMax(0.0);
    }
    cache.pre_activation[l] = std::move(z);
  }
  cache.logits = cache.pre_activation.back();
  return cache;
}

Matrix predict(const GnnModel& model, const GraphView& view) {
  Rng unused(0);
  return forward(model, view, false, unused).logits;
}

Matrix softmax(const Eigen::Ref<const Matrix>& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const Scalar m = logits.row(i).maxCoeff();
    out.row(i) = (logits.row(i).array() - m).exp().matrix();
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

double masked_cross_entropy(const Eigen::Ref<const Matrix>& logits, std::span<const int> labels,
                            const NodeMask& mask) {
  check_mask(mask, static_cast<std::size_t>(logits.rows()), labels.size());
  double total = 0.0;
  int count = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    if (!mask[i]) continue;
    const Scalar m = logits.row(i).maxCoeff();
    const Scalar log_sum = m + std::log((logits.row(i).array() - m).exp().sum());
    total += log_sum - logits(i, labels[i]);
    ++count;
  }
  if (count == 0) throw Error(ErrorKind::EmptyMask, "cross-entropy over an empty mask");
  return total / count;
}

Gradients backward(const ForwardCache& cache, std::span<const int> labels, const NodeMask& mask) {
  if (cache.model == nullptr || cache.model->stamp() != cache.stamp) {
    throw Error(ErrorKind::StaleCache, "model changed after the forward pass");
  }
  const GnnModel& model = *cache.model;
  const Matrix& logits = cache.logits;
  check_mask(mask, static_cast<std::size_t>(logits.rows()), labels.size());

  int count = 0;
  for (bool b : mask) count += b ? 1 : 0;
  if (count == 0) throw Error(ErrorKind::EmptyMask, "gradient over an empty mask");

  Matrix grad = Matrix::Zero(logits.rows(), logits.cols());
  const Matrix probs = softmax(logits);
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    if (!mask[i]) continue;
    grad.row(i) = probs.row(i) / count;
    grad(i, labels[i]) -= 1.0 / count;
  }

  const int layers = model.num_layers();
  Gradients out(layers);
  const SparseMatrix& adj = cache.view->adjacency.matrix();
  for (int l = layers - 1; l >= 0; --l) {
    const Matrix propagated = adj * grad;  // A_hat is symmetric
    out[l].bias = grad.colwise().sum().transpose();
    if (l == 0) {
      out[l].weight = cache.first_input.transpose() * propagated;
      break;
    }
    out[l].weight = cache.inputs[l].transpose() * propagated;
    Matrix upstream = propagated * model.layer(l).weight.transpose();
    if (cache.dropout_scale[l].size() != 0) upstream = upstream.cwiseProduct(cache.dropout_scale[l]);
    const Matrix& z = cache.pre_activation[l - 1];
    grad = (z.array() > 0.0).select(upstream, 0.0);
  }
  return out;
}

AdamState make_adam_state(const GnnModel& model) {
  AdamState state;
  for (const auto& p : model.layers()) {
    LayerParams zero{Matrix::Zero(p.weight.rows(), p.weight.cols()), Vector::Zero(p.bias.size())};
    state.first_moment.push_back(zero);
    state.second_moment.push_back(zero);
  }
  return state;
}

namespace {

template <typename Param>
void adam_update(Param& theta, const Param& grad, Param& m, Param& v, double lr, double wd,
                 double correction1, double correction2) {
  auto g = (grad.array() + wd * theta.array()).eval();
  m.array() = kAdamBeta1 * m.array() + (1.0 - kAdamBeta1) * g;
  v.array() = kAdamBeta2 * v.array() + (1.0 - kAdamBeta2) * g.square();
  theta.array() -= lr * (m.array() / correction1) / ((v.array() / correction2).sqrt() + kAdamEpsilon);
}

}  // namespace

void adam_step(GnnModel& model, const Gradients& grads, AdamState& state, double lr,
               std::span<const double> layer_weight_decay, int t) {
  if (t < 1) throw Error(ErrorKind::InvalidArgument, "Adam step count must be >= 1");
  if (static_cast<int>(grads.size()) != model.num_layers() ||
      static_cast<int>(layer_weight_decay.size()) != model.num_layers()) {
    throw Error(ErrorKind::ShapeMismatch, "gradient/decay layout does not match model");
  }
  if (state.first_moment.empty()) state = make_adam_state(model);
  const double correction1 = 1.0 - std::pow(kAdamBeta1, t);
  const double correction2 = 1.0 - std::pow(kAdamBeta2, t);
  for (int l = 0; l < model.num_layers(); ++l) {
    LayerParams& p = model.mutable_layer(l);
    adam_update(p.weight, grads[l].weight, state.first_moment[l].weight,
                state.second_moment[l].weight, lr, layer_weight_decay[l], correction1, correction2);
    adam_update(p.bias, grads[l].bias, state.first_moment[l].bias, state.second_moment[l].bias, lr,
                layer_weight_decay[l], correction1, correction2);
  }
  state.step = t;
}

std::vector<int> argmax_rows(const Eigen::Ref<const Matrix>& logits) {
  std::vector<int> out(logits.rows());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < logits.cols(); ++c) {
      if (logits(i, c) > logits(i, best)) best = c;
    }
    out[i] = static_cast<int>(best);
  }
  return out;
}

double accuracy(std::span<const int> predictions, std::span<const int> labels, const NodeMask& mask) {
  check_mask(mask, predictions.size(), labels.size());
  int hits = 0;
  int count = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    ++count;
    if (predictions[i] == labels[i]) ++hits;
  }
  if (count == 0) throw Error(ErrorKind::EmptyMask, "accuracy over an empty mask");
  return static_cast<double>(hits) / count;
}

double evaluate(const GnnModel& model, const GraphView& eval_view, const NodeMask& mask) {
  return accuracy(argmax_rows(predict(model, eval_view)), eval_view.base->labels, mask);
}

double evaluate(const GnnModel& model, const Graph& graph, const NodeMask& mask) {
  return evaluate(model, identity_view(graph), mask);
}

}  // namespace viewx
