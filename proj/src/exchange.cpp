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

#include "viewx/exchange.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

#include "viewx/error.hpp"

namespace viewx {
namespace {

struct StrategyName {
  ExchangeStrategy strategy;
  std::string_view name;
};

constexpr StrategyName kStrategyNames[] = {
    {ExchangeStrategy::AdaptiveOutput, "adaptive-output"},
    {ExchangeStrategy::RandomOutput, "random-output"},
    {ExchangeStrategy::InOrderOutput, "inorder-output"},
    {ExchangeStrategy::AdaptiveInput, "adaptive-input"},
    {ExchangeStrategy::RandomInput, "random-input"},
    {ExchangeStrategy::InOrderInput, "inorder-input"},
    {ExchangeStrategy::PointwiseRandom, "pointwise"},
    {ExchangeStrategy::RandomInitPartner, "random-init"},
    {ExchangeStrategy::SelfExchange, "self"},
};

Axis strategy_axis(ExchangeStrategy s) {
  switch (s) {
    case ExchangeStrategy::AdaptiveInput:
    case ExchangeStrategy::RandomInput:
    case ExchangeStrategy::InOrderInput:
      return Axis::Input;
    default:
      return Axis::Output;
  }
}

/// Channels laid out as columns: the matrix itself for Output, its transpose for Input.
Matrix channels_as_columns(const Eigen::Ref<const Matrix>& w, Axis axis) {
  return axis == Axis::Output ? Matrix(w) : Matrix(w.transpose());
}

/// Centered, unit-norm copy of column j (zero vector for a constant column).
Vector normalized_column(const Matrix& w, Eigen::Index j) {
  Vector c = w.col(j).array() - w.col(j).mean();
  const double norm = c.norm();
  if (norm == 0.0) return Vector::Zero(c.size());
  return c / norm;
}

/// Pairwise correlations of the columns of a matrix, kept up to date as
/// individual columns change.
class CorrelationTracker {
 public:
  explicit CorrelationTracker(const Matrix& channels)
      : normalized_(channels.rows(), channels.cols()),
        corr_(channels.cols(), channels.cols()) {
    for (Eigen::Index j = 0; j < channels.cols(); ++j) normalized_.col(j) = normalized_column(channels, j);
    for (Eigen::Index a = 0; a < channels.cols(); ++a) {
      for (Eigen::Index b = a + 1; b < channels.cols(); ++b) set(a, b);
    }
  }

  void update(const Matrix& channels, Eigen::Index j) {
    normalized_.col(j) = normalized_column(channels, j);
    for (Eigen::Index other = 0; other < channels.cols(); ++other) {
      if (other != j) set(std::min(j, other), std::max(j, other));
    }
  }

  ChannelPair best() const {
    ChannelPair out{0, 1, -std::numeric_limits<double>::infinity()};
    const Eigen::Index c = corr_.cols();
    for (Eigen::Index a = 0; a < c; ++a) {
      for (Eigen::Index b = a + 1; b < c; ++b) {
        if (corr_(a, b) > out.correlation) out = {static_cast<int>(a), static_cast<int>(b), corr_(a, b)};
      }
    }
    return out;
  }

 private:
  void set(Eigen::Index a, Eigen::Index b) {
    corr_(a, b) = normalized_.col(a).dot(normalized_.col(b));
  }

  Matrix normalized_;
  Matrix corr_;  // upper triangle used
};

/// Entropy of `target` with column r replaced by each column of `source`.
/// Columns that stay inside the range of the untouched part share one histogram.
std::vector<double> substitution_entropies(const Matrix& source, const Matrix& target, int r, int bins) {
  const Eigen::Index rows = target.rows();
  const Eigen::Index cols = target.cols();
  double rest_lo = std::numeric_limits<double>::infinity();
  double rest_hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (j == r) continue;
    rest_lo = std::min(rest_lo, target.col(j).minCoeff());
    rest_hi = std::max(rest_hi, target.col(j).maxCoeff());
  }
  auto rest_histogram = [&](double lo, double hi) {
    std::vector<std::int64_t> counts(bins, 0);
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (j == r) continue;
      for (Eigen::Index i = 0; i < rows; ++i) ++counts[bin_index(target(i, j), lo, hi, bins)];
    }
    return counts;
  };
  const std::vector<std::int64_t> shared = rest_histogram(rest_lo, rest_hi);

  std::vector<double> out(source.cols());
  for (Eigen::Index i = 0; i < source.cols(); ++i) {
    const double lo = std::min(rest_lo, source.col(i).minCoeff());
    const double hi = std::max(rest_hi, source.col(i).maxCoeff());
    std::vector<std::int64_t> counts = (lo == rest_lo && hi == rest_hi) ? shared : rest_histogram(lo, hi);
    for (Eigen::Index k = 0; k < rows; ++k) ++counts[bin_index(source(k, i), lo, hi, bins)];
    out[i] = histogram_entropy(std::move(counts));
  }
  return out;
}

Substitution select_on_columns(const Matrix& source, const Matrix& target, int idx1, int idx2, int bins) {
  const int lo_r = std::min(idx1, idx2);
  const int hi_r = std::max(idx1, idx2);
  const std::vector<double> first = substitution_entropies(source, target, lo_r, bins);
  const std::vector<double> second = substitution_entropies(source, target, hi_r, bins);
  Substitution best{0, lo_r, -1.0};
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (first[i] > best.entropy) best = {static_cast<int>(i), lo_r, first[i]};
    if (second[i] > best.entropy) best = {static_cast<int>(i), hi_r, second[i]};
  }
  return best;
}

void check_channel(const char* what, int c, Eigen::Index count) {
  if (c < 0 || c >= count) {
    throw Error(ErrorKind::IndexOutOfRange, std::string(what) + " channel " + std::to_string(c) +
                                                " outside [0, " + std::to_string(count) + ")");
  }
}

}  // namespace

std::string_view to_string(ExchangeStrategy s) {
  for (const auto& entry : kStrategyNames) {
    if (entry.strategy == s) return entry.name;
  }
  return "unknown";
}

ExchangeStrategy parse_strategy(std::string_view s) {
  for (const auto& entry : kStrategyNames) {
    if (entry.name == s) return entry.strategy;
  }
  if (s == "pointwise-random") return ExchangeStrategy::PointwiseRandom;
  if (s == "random-init-partner") return ExchangeStrategy::RandomInitPartner;
  if (s == "self-exchange") return ExchangeStrategy::SelfExchange;
  throw Error(ErrorKind::InvalidArgument, "unknown exchange strategy '" + std::string(s) + "'");
}

const std::vector<ExchangeStrategy>& all_strategies() {
  static const std::vector<ExchangeStrategy> all = [] {
    std::vector<ExchangeStrategy> v;
    for (const auto& entry : kStrategyNames) v.push_back(entry.strategy);
    return v;
  }();
  return all;
}

void ExchangeConfig::validate() const {
  if (iterations < 1) throw Error(ErrorKind::InvalidArgument, "exchange iterations must be >= 1");
  if (channels_per_layer < 1) throw Error(ErrorKind::InvalidArgument, "channels per layer must be >= 1");
  entropy.validate();
}

std::string ExchangeEvent::to_json_line() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"iteration\":" << iteration << ",\"source\":" << source << ",\"target\":" << target
     << ",\"layer\":" << layer << ",\"step\":" << step << ",\"axis\":\""
     << (axis == Axis::Output ? "output" : "input") << "\",\"source_channel\":" << source_channel
     << ",\"idx1\":" << idx1 << ",\"idx2\":" << idx2 << ",\"target_channel\":" << target_channel
     << ",\"correlation\":" << correlation << ",\"entropy_before\":" << entropy_before
     << ",\"entropy_after\":" << entropy_after << ",\"scalars_moved\":" << scalars_moved << "}";
  return os.str();
}

ChannelPair most_correlated_pair(const Eigen::Ref<const Matrix>& w, Axis axis) {
  const Matrix channels = channels_as_columns(w, axis);
  if (channels.cols() < 2) throw Error(ErrorKind::TooFewChannels, "need at least 2 channels");
  if (channels.rows() < 2) throw Error(ErrorKind::TooFewChannels, "channels need length >= 2");
  return CorrelationTracker(channels).best();
}

Substitution select_exchange(const Eigen::Ref<const Matrix>& source,
                             const Eigen::Ref<const Matrix>& target, int idx1, int idx2,
                             const EntropyConfig& cfg, Axis axis) {
  cfg.validate();
  if (source.rows() != target.rows() || source.cols() != target.cols()) {
    throw Error(ErrorKind::ShapeMismatch, "source and target layers differ in shape");
  }
  if (source.size() == 0) throw Error(ErrorKind::EmptyMatrix, "empty layer");
  const Matrix s = channels_as_columns(source, axis);
  const Matrix t = channels_as_columns(target, axis);
  check_channel("idx1", idx1, t.cols());
  check_channel("idx2", idx2, t.cols());
  if (idx1 == idx2) throw Error(ErrorKind::InvalidArgument, "idx1 and idx2 must differ");
  return select_on_columns(s, t, idx1, idx2, cfg.num_bins);
}

void swap_channels(GnnModel& a, GnnModel& b, int layer, int chan_a, int chan_b, Axis axis) {
  if (layer < 0 || layer >= a.num_layers() || layer >= b.num_layers()) {
    throw Error(ErrorKind::IndexOutOfRange, "layer " + std::to_string(layer) + " out of range");
  }
  if (a.layer(layer).weight.rows() != b.layer(layer).weight.rows() ||
      a.layer(layer).weight.cols() != b.layer(layer).weight.cols()) {
    throw Error(ErrorKind::ShapeMismatch, "layer shapes differ between models");
  }
  const Eigen::Index count =
      axis == Axis::Output ? a.layer(layer).weight.cols() : a.layer(layer).weight.rows();
  check_channel("first", chan_a, count);
  check_channel("second", chan_b, count);

  if (&a == &b) {
    if (chan_a == chan_b) return;
    LayerParams& p = a.mutable_layer(layer);
    if (axis == Axis::Output) {
      p.weight.col(chan_a).swap(p.weight.col(chan_b));
      std::swap(p.bias(chan_a), p.bias(chan_b));
    } else {
      p.weight.row(chan_a).swap(p.weight.row(chan_b));
    }
    return;
  }
  LayerParams& pa = a.mutable_layer(layer);
  LayerParams& pb = b.mutable_layer(layer);
  if (axis == Axis::Output) {
    pa.weight.col(chan_a).swap(pb.weight.col(chan_b));
    std::swap(pa.bias(chan_a), pb.bias(chan_b));
  } else {
    pa.weight.row(chan_a).swap(pb.weight.row(chan_b));
  }
}

int input_channel_budget(int m, int c_in, int c_out) {
  const long long weights = static_cast<long long>(m) * c_in;
  return static_cast<int>((weights + c_out - 1) / c_out);
}

std::vector<ExchangeEvent> exchange_layer(GnnModel& source, GnnModel& target, int layer,
                                          const ExchangeConfig& cfg, Rng& rng) {
  cfg.validate();
  if (source.spec().layer_sizes != target.spec().layer_sizes) {
    throw Error(ErrorKind::SpecMismatch, "source and target models have different architectures");
  }
  if (layer < 0 || layer >= target.num_layers()) {
    throw Error(ErrorKind::IndexOutOfRange, "layer " + std::to_string(layer) + " out of range");
  }
  const int c_in = static_cast<int>(target.layer(layer).weight.rows());
  const int c_out = static_cast<int>(target.layer(layer).weight.cols());
  const int m = cfg.channels_per_layer;
  const ExchangeStrategy strategy = cfg.strategy;
  const Axis axis = strategy_axis(strategy);
  const int channel_count = axis == Axis::Output ? c_out : c_in;
  const int channel_length = axis == Axis::Output ? c_in : c_out;
  const int steps = axis == Axis::Output ? m : input_channel_budget(m, c_in, c_out);

  auto target_entropy = [&] { return matrix_entropy(target.layer(layer).weight, cfg.entropy); };
  auto base_event = [&](int step) {
    ExchangeEvent e;
    e.layer = layer;
    e.step = step;
    e.axis = axis;
    e.entropy_before = target_entropy();
    e.scalars_moved = channel_length;
    return e;
  };

  std::vector<ExchangeEvent> events;
  switch (strategy) {
    case ExchangeStrategy::AdaptiveOutput:
    case ExchangeStrategy::AdaptiveInput: {
      if (channel_count < 2 || channel_length < 2) {
        throw Error(ErrorKind::TooFewChannels, "adaptive exchange needs >= 2 channels of length >= 2");
      }
      Matrix target_channels = channels_as_columns(target.layer(layer).weight, axis);
      CorrelationTracker tracker(target_channels);
      for (int step = 0; step < steps; ++step) {
        ExchangeEvent e = base_event(step);
        const ChannelPair pair = tracker.best();
        const Matrix source_channels = channels_as_columns(source.layer(layer).weight, axis);
        const Substitution pick =
            select_on_columns(source_channels, target_channels, pair.idx1, pair.idx2, cfg.entropy.num_bins);
        swap_channels(source, target, layer, pick.source_channel, pick.target_channel, axis);
        target_channels = channels_as_columns(target.layer(layer).weight, axis);
        tracker.update(target_channels, pick.target_channel);
        e.idx1 = pair.idx1;
        e.idx2 = pair.idx2;
        e.correlation = pair.correlation;
        e.source_channel = pick.source_channel;
        e.target_channel = pick.target_channel;
        e.entropy_after = target_entropy();
        events.push_back(e);
      }
      break;
    }
    case ExchangeStrategy::RandomOutput:
    case ExchangeStrategy::RandomInput:
    case ExchangeStrategy::RandomInitPartner: {
      GnnModel partner;
      GnnModel* from = &source;
      if (strategy == ExchangeStrategy::RandomInitPartner) {
        partner = init_model(target.spec(), rng.next_u64());
        from = &partner;
      }
      for (int step = 0; step < steps; ++step) {
        ExchangeEvent e = base_event(step);
        const int i = static_cast<int>(rng.below(channel_count));
        const int r = static_cast<int>(rng.below(channel_count));
        swap_channels(*from, target, layer, i, r, axis);
        e.source_channel = i;
        e.target_channel = e.idx1 = e.idx2 = r;
        e.entropy_after = target_entropy();
        events.push_back(e);
      }
      break;
    }
    case ExchangeStrategy::InOrderOutput:
    case ExchangeStrategy::InOrderInput: {
      if (steps > channel_count) {
        throw Error(ErrorKind::MTooLarge, std::to_string(steps) + " in-order swaps exceed " +
                                              std::to_string(channel_count) + " channels");
      }
      for (int step = 0; step < steps; ++step) {
        ExchangeEvent e = base_event(step);
        swap_channels(source, target, layer, step, step, axis);
        e.source_channel = e.target_channel = e.idx1 = e.idx2 = step;
        e.entropy_after = target_entropy();
        events.push_back(e);
      }
      break;
    }
    case ExchangeStrategy::PointwiseRandom: {
      const long long total = static_cast<long long>(c_in) * c_out;
      const long long wanted = static_cast<long long>(m) * c_in;
      if (wanted > total) {
        throw Error(ErrorKind::MTooLarge, "pointwise budget exceeds the layer size");
      }
      // Partial Fisher-Yates: the first `wanted` slots are distinct positions.
      std::vector<long long> positions(total);
      std::iota(positions.begin(), positions.end(), 0LL);
      for (long long k = 0; k < wanted; ++k) {
        const long long j = k + static_cast<long long>(rng.below(static_cast<std::uint64_t>(total - k)));
        std::swap(positions[k], positions[j]);
      }
      for (int step = 0; step < m; ++step) {
        ExchangeEvent e = base_event(step);
        e.axis = Axis::Output;
        e.scalars_moved = c_in;
        Matrix& ws = source.mutable_layer(layer).weight;
        Matrix& wt = target.mutable_layer(layer).weight;
        for (int k = 0; k < c_in; ++k) {
          const long long pos = positions[static_cast<std::size_t>(step) * c_in + k];
          std::swap(ws(pos % c_in, pos / c_in), wt(pos % c_in, pos / c_in));
        }
        e.entropy_after = target_entropy();
        events.push_back(e);
      }
      break;
    }
    case ExchangeStrategy::SelfExchange: {
      if (c_out < 2) throw Error(ErrorKind::TooFewChannels, "self exchange needs >= 2 output channels");
      for (int step = 0; step < steps; ++step) {
        ExchangeEvent e = base_event(step);
        const int i = static_cast<int>(rng.below(c_out));
        int r = static_cast<int>(rng.below(c_out - 1));
        if (r >= i) ++r;
        swap_channels(target, target, layer, i, r, Axis::Output);
        e.source_channel = i;
        e.target_channel = e.idx1 = e.idx2 = r;
        e.entropy_after = target_entropy();
        events.push_back(e);
      }
      break;
    }
  }
  return events;
}

std::pair<int, int> schedule_pair(int n, int k) { return {(n - 1) % k, n % k}; }

std::vector<ExchangeEvent> run_schedule(std::vector<GnnModel>& models, const ExchangeConfig& cfg,
                                        Rng& rng) {
  cfg.validate();
  const int k = static_cast<int>(models.size());
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "the exchange schedule needs at least 2 models");
  for (const auto& model : models) {
    if (model.spec().layer_sizes != models.front().spec().layer_sizes) {
      throw Error(ErrorKind::SpecMismatch, "all models in a schedule must share one architecture");
    }
  }
  std::vector<int> layers = cfg.layers;
  if (layers.empty()) {
    layers.resize(models.front().num_layers());
    std::iota(layers.begin(), layers.end(), 0);
  }

  std::vector<ExchangeEvent> events;
  for (int n = 1; n <= cfg.iterations; ++n) {
    const auto [s, t] = schedule_pair(n, k);
    for (int layer : layers) {
      for (ExchangeEvent& e : exchange_layer(models[s], models[t], layer, cfg, rng)) {
        e.iteration = n;
        e.source = s;
        e.target = t;
        events.push_back(e);
      }
    }
  }
  return events;
}

}  // namespace viewx
