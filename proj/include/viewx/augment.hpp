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
#include <string_view>
#include <vector>

#include "viewx/graph.hpp"
#include "viewx/random.hpp"

namespace viewx {

enum class AugmentKind { Identity, MaskFeatures, CorruptFeatures, DropEdges, ExtractSubgraph };

std::string_view to_string(AugmentKind kind);

struct AugmentSpec {
  double p_mask = 0.1;
  double p_corrupt = 0.0;
  double p_drop_edge = 0.1;
  double p_subgraph = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// An augmented copy of a base graph. Node count, labels and masks are those
/// of the base; features and edges may differ. The base must outlive the view.
struct GraphView {
  const Graph* base = nullptr;
  Matrix features;
  EdgeList edges;
  NormalizedAdjacency adjacency;
  SparseMatrix sparse_features;  // same values as `features`, for the first layer
  AugmentKind kind = AugmentKind::Identity;
  double probability = 0.0;
  std::uint64_t stream_seed = 0;

  int num_nodes() const { return base->num_nodes; }
  int num_features() const { return static_cast<int>(features.cols()); }
};

/// View equal to the graph itself (used for evaluation and for zero-probability views).
GraphView identity_view(const Graph& g);

/// Zeroes one shared random subset of feature columns (each column with probability p).
GraphView mask_features(const Graph& g, double p, Rng& rng);
/// Replaces each entry independently with probability p by a draw from N(mean(row), 1).
GraphView corrupt_features(const Graph& g, double p, Rng& rng);
/// Drops each undirected edge independently with probability p.
GraphView drop_edges(const Graph& g, double p, Rng& rng);
/// Removes each node with probability p from the induced node set: its feature
/// row is zeroed and its incident edges dropped; node slots are kept.
GraphView extract_subgraph(const Graph& g, double p, Rng& rng);

/// View k (1-based) applies [mask, corrupt, drop, subgraph][(k-1) % 4] with its
/// probability, drawing from a stream seeded by spec.seed ^ k. Throws TooFewViews.
std::vector<GraphView> generate_views(const Graph& g, const AugmentSpec& spec, int k);

}  // namespace viewx
