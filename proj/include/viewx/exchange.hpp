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
#include <string>
#include <string_view>
#include <vector>

#include "viewx/entropy.hpp"
#include "viewx/gcn.hpp"
#include "viewx/random.hpp"

namespace viewx {

enum class Axis { Output, Input };

enum class ExchangeStrategy {
  AdaptiveOutput,
  RandomOutput,
  InOrderOutput,
  AdaptiveInput,
  RandomInput,
  InOrderInput,
  PointwiseRandom,
  RandomInitPartner,
  SelfExchange,
};

std::string_view to_string(ExchangeStrategy s);
/// Accepts the CLI spelling (adaptive-output, pointwise, ...). Throws InvalidArgument.
ExchangeStrategy parse_strategy(std::string_view s);
const std::vector<ExchangeStrategy>& all_strategies();

struct ExchangeConfig {
  int iterations = 3;          // N
  int channels_per_layer = 5;  // M
  ExchangeStrategy strategy = ExchangeStrategy::AdaptiveOutput;
  EntropyConfig entropy;
  std::vector<int> layers;     // empty = every layer

  void validate() const;
};

/// One exchange step on one layer.
struct ExchangeEvent {
  int iteration = 0;  // 1-based schedule iteration (0 outside a schedule)
  int source = -1;    // model indices within the schedule
  int target = -1;
  int layer = 0;
  int step = 0;       // 0-based step within the layer
  Axis axis = Axis::Output;
  int source_channel = -1;  // i
  int idx1 = -1;
  int idx2 = -1;
  int target_channel = -1;  // r
  double correlation = 0.0;
  double entropy_before = 0.0;
  double entropy_after = 0.0;
  std::int64_t scalars_moved = 0;  // weight entries taken into the target

  /// One line of the exchange trace (a flat JSON object).
  std::string to_json_line() const;
};

struct ChannelPair {
  int idx1 = 0;
  int idx2 = 1;
  double correlation = 0.0;
};

/// Most (signed) correlated pair of columns (Output) or rows (Input), ties to the
/// lexicographically smallest pair. Throws TooFewChannels.
ChannelPair most_correlated_pair(const Eigen::Ref<const Matrix>& w, Axis axis);

struct Substitution {
  int source_channel = 0;  // i
  int target_channel = 0;  // r
  double entropy = 0.0;
};

/// argmax over i in [C] and r in {idx1, idx2} of the target's entropy after its
/// channel r is replaced by the source's channel i. Ties go to the smallest i,
/// then the smallest r. Throws ShapeMismatch, IndexOutOfRange.
Substitution select_exchange(const Eigen::Ref<const Matrix>& source,
                             const Eigen::Ref<const Matrix>& target, int idx1, int idx2,
                             const EntropyConfig& cfg, Axis axis = Axis::Output);
inline Substitution select_exchange(const LayerParams& source, const LayerParams& target,
                                    int idx1, int idx2, const EntropyConfig& cfg) {
  return select_exchange(source.weight, target.weight, idx1, idx2, cfg, Axis::Output);
}

/// Exchanges channel chan_a of `a` with channel chan_b of `b` at layer l. Output
/// channels carry their bias entry; input channels are weight rows only.
/// Throws IndexOutOfRange, ShapeMismatch.
void swap_channels(GnnModel& a, GnnModel& b, int layer, int chan_a, int chan_b, Axis axis);

/// Number of channels the input-axis strategies swap so that they move as many
/// weights as M output channels: ceil(M * C_in / C_out).
int input_channel_budget(int m, int c_in, int c_out);

/// M sequential exchange steps from `source` into `target` at layer l under
/// cfg.strategy. Throws MTooLarge, SpecMismatch.
std::vector<ExchangeEvent> exchange_layer(GnnModel& source, GnnModel& target, int layer,
                                          const ExchangeConfig& cfg, Rng& rng);

/// Source/target (0-based) of 1-based iteration n among k models:
/// s = (n-1) % k, t = n % k.
std::pair<int, int> schedule_pair(int n, int k);

/// N iterations of the cyclic schedule; every configured layer is exchanged in
/// each iteration. Events are returned in (iteration, layer, step) order.
/// Throws SpecMismatch, InvalidArgument.
std::vector<ExchangeEvent> run_schedule(std::vector<GnnModel>& models, const ExchangeConfig& cfg,
                                        Rng& rng);

}  // namespace viewx
