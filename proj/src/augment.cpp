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

#include "viewx/augment.hpp"

#include <string>

#include "viewx/error.hpp"

namespace viewx {
namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(name) + " = " + std::to_string(p) + " outside [0, 1]");
  }
}

GraphView finish(const Graph& g, Matrix features, EdgeList edges, AugmentKind kind, double p) {
  GraphView view;
  view.base = &g;
  view.features = std::move(features);
  view.edges = std::move(edges);
  view.adjacency = normalize_adjacency(g.num_nodes, view.edges);
  view.sparse_features = view.features.sparseView(0.0, 0.0);
  view.sparse_features.makeCompressed();
  view.kind = kind;
  view.probability = p;
  return view;
}

}  // namespace

std::string_view to_string(AugmentKind kind) {
  switch (kind) {
    case AugmentKind::Identity: return "identity";
    case AugmentKind::MaskFeatures: return "mask-features";
    case AugmentKind::CorruptFeatures: return "corrupt-features";
    case AugmentKind::DropEdges: return "drop-edges";
    case AugmentKind::ExtractSubgraph: return "extract-subgraph";
  }
  return "unknown";
}

void AugmentSpec::validate() const {
  check_probability(p_mask, "p_mask");
  check_probability(p_corrupt, "p_corrupt");
  check_probability(p_drop_edge, "p_drop_edge");
  check_probability(p_subgraph, "p_subgraph");
}

GraphView identity_view(const Graph& g) {
  return finish(g, g.features, g.edges, AugmentKind::Identity, 0.0);
}

GraphView mask_features(const Graph& g, double p, Rng& rng) {
  check_probability(p, "mask probability");
  Matrix x = g.features;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (rng.bernoulli(p)) x.col(j).setZero();
  }
  return finish(g, std::move(x), g.edges, AugmentKind::MaskFeatures, p);
}

GraphView corrupt_features(const Graph& g, double p, Rng& rng) {
  check_probability(p, "corrupt probability");
  Matrix x = g.features;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Scalar mu = x.cols() > 0 ? g.features.row(i).mean() : 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (rng.bernoulli(p)) x(i, j) = mu + rng.normal();
    }
  }
  return finish(g, std::move(x), g.edges, AugmentKind::CorruptFeatures, p);
}

GraphView drop_edges(const Graph& g, double p, Rng& rng) {
  check_probability(p, "drop probability");
  EdgeList kept;
  kept.reserve(g.edges.size());
  for (const Edge& e : g.edges) {
    if (!rng.bernoulli(p)) kept.push_back(e);
  }
  return finish(g, g.features, std::move(kept), AugmentKind::DropEdges, p);
}

GraphView extract_subgraph(const Graph& g, double p, Rng& rng) {
  check_probability(p, "subgraph probability");
  std::vector<bool> keep(g.num_nodes);
  for (int v = 0; v < g.num_nodes; ++v) keep[v] = !rng.bernoulli(p);
  Matrix x = g.features;
  for (int v = 0; v < g.num_nodes; ++v) {
    if (!keep[v]) x.row(v).setZero();
  }
  EdgeList kept;
  for (const Edge& e : g.edges) {
    if (keep[e.first] && keep[e.second]) kept.push_back(e);
  }
  return finish(g, std::move(x), std::move(kept), AugmentKind::ExtractSubgraph, p);
}

std::vector<GraphView> generate_views(const Graph& g, const AugmentSpec& spec, int k) {
  if (k < 2) throw Error(ErrorKind::TooFewViews, "need at least 2 views, got " + std::to_string(k));
  spec.validate();
  std::vector<GraphView> views;
  views.reserve(k);
  for (int view = 1; view <= k; ++view) {
    const std::uint64_t stream = spec.seed ^ static_cast<std::uint64_t>(view);
    Rng rng(stream);
    GraphView v;
    switch ((view - 1) % 4) {
      case 0: v = mask_features(g, spec.p_mask, rng); break;
      case 1: v = corrupt_features(g, spec.p_corrupt, rng); break;
      case 2: v = drop_edges(g, spec.p_drop_edge, rng); break;
      default: v = extract_subgraph(g, spec.p_subgraph, rng); break;
    }
    v.stream_seed = stream;
    views.push_back(std::move(v));
  }
  return views;
}

}  // namespace viewx
