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

#include "viewx/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "viewx/error.hpp"

namespace viewx {
namespace {

std::vector<NodeId> mask_to_nodes(const NodeMask& mask) {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

void check_node(int n, NodeId v, const char* where) {
  if (v < 0 || v >= n) {
    throw Error(ErrorKind::OutOfRangeIndex,
                std::string(where) + " node " + std::to_string(v) + " outside [0, " +
                    std::to_string(n) + ")");
  }
}

}  // namespace

std::vector<NodeId> Graph::train_nodes() const { return mask_to_nodes(train_mask); }
std::vector<NodeId> Graph::val_nodes() const { return mask_to_nodes(val_mask); }
std::vector<NodeId> Graph::test_nodes() const { return mask_to_nodes(test_mask); }

Graph build_graph(int num_nodes, const EdgeList& edges, Matrix features,
                  std::vector<int> labels, const Splits& splits, int num_classes) {
  if (num_nodes < 0) throw Error(ErrorKind::InvalidArgument, "negative node count");
  if (features.rows() != num_nodes) {
    throw Error(ErrorKind::ShapeMismatch, "feature matrix has " +
                                              std::to_string(features.rows()) + " rows, expected " +
                                              std::to_string(num_nodes));
  }
  if (static_cast<int>(labels.size()) != num_nodes) {
    throw Error(ErrorKind::ShapeMismatch, "label vector has " + std::to_string(labels.size()) +
                                              " entries, expected " + std::to_string(num_nodes));
  }

  Graph g;
  g.num_nodes = num_nodes;
  g.num_features = static_cast<int>(features.cols());
  g.features = std::move(features);

  g.edges.reserve(edges.size());
  for (auto [u, v] : edges) {
    check_node(num_nodes, u, "edge");
    check_node(num_nodes, v, "edge");
    if (u == v) throw Error(ErrorKind::SelfLoopEdge, "self-loop on node " + std::to_string(u));
    g.edges.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());

  if (num_classes < 0) {
    int max_label = -1;
    for (int y : labels) max_label = std::max(max_label, y);
    num_classes = max_label + 1;
  }
  g.num_classes = num_classes;

  g.train_mask.assign(num_nodes, false);
  g.val_mask.assign(num_nodes, false);
  g.test_mask.assign(num_nodes, false);
  std::vector<int> owner(num_nodes, -1);
  const std::vector<NodeId>* lists[] = {&splits.train, &splits.val, &splits.test};
  NodeMask* masks[] = {&g.train_mask, &g.val_mask, &g.test_mask};
  const char* names[] = {"train", "val", "test"};
  for (int s = 0; s < 3; ++s) {
    for (NodeId v : *lists[s]) {
      check_node(num_nodes, v, names[s]);
      if (owner[v] != -1 && owner[v] != s) {
        throw Error(ErrorKind::OverlappingSplits, "node " + std::to_string(v) + " is in both " +
                                                      names[owner[v]] + " and " + names[s]);
      }
      owner[v] = s;
      (*masks[s])[v] = true;
    }
  }
  for (int v = 0; v < num_nodes; ++v) {
    const int y = labels[v];
    if (y < -1 || y >= num_classes || (owner[v] != -1 && y < 0)) {
      throw Error(ErrorKind::OutOfRangeIndex,
                  "label " + std::to_string(y) + " of node " + std::to_string(v) +
                      " outside [0, " + std::to_string(num_classes) + ")");
    }
  }
  g.labels = std::move(labels);
  return g;
}

Graph row_normalize_features(Graph g) {
  for (Eigen::Index i = 0; i < g.features.rows(); ++i) {
    const Scalar s = g.features.row(i).sum();
    if (s != 0.0) g.features.row(i) /= s;
  }
  return g;
}

std::span<const int> NormalizedAdjacency::row_offsets() const {
  return {matrix_.outerIndexPtr(), static_cast<std::size_t>(matrix_.rows() + 1)};
}
std::span<const int> NormalizedAdjacency::column_ids() const {
  return {matrix_.innerIndexPtr(), static_cast<std::size_t>(matrix_.nonZeros())};
}
std::span<const Scalar> NormalizedAdjacency::values() const {
  return {matrix_.valuePtr(), static_cast<std::size_t>(matrix_.nonZeros())};
}

std::vector<int> degrees(int num_nodes, const EdgeList& edges) {
  std::vector<int> deg(num_nodes, 0);
  for (auto [u, v] : edges) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

NormalizedAdjacency normalize_adjacency(int num_nodes, const EdgeList& edges) {
  const std::vector<int> deg = degrees(num_nodes, edges);
  std::vector<Scalar> inv_sqrt(num_nodes);
  for (int v = 0; v < num_nodes; ++v) inv_sqrt[v] = 1.0 / std::sqrt(deg[v] + 1.0);

  std::vector<Eigen::Triplet<Scalar, int>> triplets;
  triplets.reserve(2 * edges.size() + num_nodes);
  for (int v = 0; v < num_nodes; ++v) triplets.emplace_back(v, v, inv_sqrt[v] * inv_sqrt[v]);
  for (auto [u, v] : edges) {
    // Same operand order for both directions keeps the matrix bitwise symmetric.
    const Scalar w = inv_sqrt[std::min(u, v)] * inv_sqrt[std::max(u, v)];
    triplets.emplace_back(u, v, w);
    triplets.emplace_back(v, u, w);
  }
  SparseMatrix m(num_nodes, num_nodes);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return NormalizedAdjacency(std::move(m));
}

Matrix spmm(const NormalizedAdjacency& adj, const Eigen::Ref<const Matrix>& h) {
  if (h.rows() != adj.size()) {
    throw Error(ErrorKind::ShapeMismatch, "spmm: dense operand has " + std::to_string(h.rows()) +
                                              " rows, adjacency has " + std::to_string(adj.size()));
  }
  Matrix out = adj.matrix() * h;
  return out;
}

}  // namespace viewx
