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
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace viewx {

using Scalar = double;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, int>;

using NodeId = int;
using Edge = std::pair<NodeId, NodeId>;
using EdgeList = std::vector<Edge>;
/// Boolean node mask, one entry per node.
using NodeMask = std::vector<bool>;

struct Splits {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;
};

/// Undirected, unweighted, attributed graph with a transductive split.
/// Edges are canonical (u < v), sorted and unique. Immutable once built.
struct Graph {
  int num_nodes = 0;
  int num_features = 0;
  int num_classes = 0;
  Matrix features;            // num_nodes x num_features
  EdgeList edges;
  std::vector<int> labels;    // -1 marks an unlabeled node
  NodeMask train_mask;
  NodeMask val_mask;
  NodeMask test_mask;

  std::vector<NodeId> train_nodes() const;
  std::vector<NodeId> val_nodes() const;
  std::vector<NodeId> test_nodes() const;
};

/// Validating constructor. Symmetric duplicates collapse to one edge.
/// Throws OutOfRangeIndex, SelfLoopEdge, OverlappingSplits, ShapeMismatch.
/// num_classes < 0 infers the class count from the labels.
Graph build_graph(int num_nodes, const EdgeList& edges, Matrix features,
                  std::vector<int> labels, const Splits& splits, int num_classes = -1);

/// Same graph with every feature row scaled to sum to one (all-zero rows stay zero).
[[nodiscard]] Graph row_normalize_features(Graph g);

/// Renormalized adjacency D^-1/2 (A + I) D^-1/2 in compressed-row form.
/// Symmetric, strictly positive, with a positive diagonal.
class NormalizedAdjacency {
 public:
  NormalizedAdjacency() = default;
  explicit NormalizedAdjacency(SparseMatrix m) : matrix_(std::move(m)) {}

  int size() const { return static_cast<int>(matrix_.rows()); }
  const SparseMatrix& matrix() const { return matrix_; }

  std::span<const int> row_offsets() const;
  std::span<const int> column_ids() const;
  std::span<const Scalar> values() const;

 private:
  SparseMatrix matrix_;
};

NormalizedAdjacency normalize_adjacency(int num_nodes, const EdgeList& edges);
inline NormalizedAdjacency normalize_adjacency(const Graph& g) {
  return normalize_adjacency(g.num_nodes, g.edges);
}

/// Sparse-dense product adj * h. Throws ShapeMismatch.
Matrix spmm(const NormalizedAdjacency& adj, const Eigen::Ref<const Matrix>& h);

/// Node degrees in the undirected edge list.
std::vector<int> degrees(int num_nodes, const EdgeList& edges);

}  // namespace viewx
