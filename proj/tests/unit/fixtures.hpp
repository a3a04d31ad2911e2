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

#include <set>
#include <vector>

#include "viewx/augment.hpp"
#include "viewx/gcn.hpp"
#include "viewx/graph.hpp"
#include "viewx/random.hpp"

namespace viewx::testing {

inline Graph triangle(int d = 2) {
  Splits s{{0}, {1}, {2}};
  return build_graph(3, {{0, 1}, {1, 2}, {0, 2}}, Matrix::Ones(3, d), {0, 1, 0}, s, 2);
}

/// Erdos-Renyi graph with Gaussian features, labels in [0, c) and a
/// train/val/test split over the first three thirds of the nodes.
inline Graph random_graph(int n, int d, int c, double p, Rng& rng) {
  EdgeList edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (rng.bernoulli(p)) edges.emplace_back(u, v);
    }
  }
  Matrix x(n, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < n; ++i) x(i, j) = rng.normal();
  }
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = static_cast<int>(rng.below(c));
  Splits s;
  for (int i = 0; i < n; ++i) {
    if (i % 3 == 0) {
      s.train.push_back(i);
    } else if (i % 3 == 1) {
      s.val.push_back(i);
    } else {
      s.test.push_back(i);
    }
  }
  return build_graph(n, edges, std::move(x), std::move(labels), s, c);
}

inline Matrix dense(const NormalizedAdjacency& a) { return Matrix(a.matrix()); }

inline Matrix random_matrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = rng.normal();
  }
  return m;
}

/// Every scalar parameter of the given models, sorted.
inline std::vector<double> sorted_parameters(std::initializer_list<const GnnModel*> models) {
  std::vector<double> out;
  for (const GnnModel* m : models) {
    for (const LayerParams& p : m->layers()) {
      out.insert(out.end(), p.weight.data(), p.weight.data() + p.weight.size());
      out.insert(out.end(), p.bias.data(), p.bias.data() + p.bias.size());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace viewx::testing
