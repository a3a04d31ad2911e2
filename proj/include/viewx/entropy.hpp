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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "viewx/error.hpp"

namespace viewx {

struct EntropyConfig {
  int num_bins = 30;

  void validate() const {
    if (num_bins < 2) throw Error(ErrorKind::InvalidArgument, "entropy needs at least 2 bins");
  }
};

/// Bin of x among `bins` equal-width bins over [lo, hi]; x == hi lands in the last bin.
inline int bin_index(double x, double lo, double hi, int bins) {
  if (!(hi > lo)) return 0;
  const int b = static_cast<int>((x - lo) / (hi - lo) * bins);
  return std::clamp(b, 0, bins - 1);
}

/// Shannon entropy (natural log) of a histogram. Counts are summed in sorted
/// order so that any permutation of the same counts gives the same bits.
inline double histogram_entropy(std::vector<std::int64_t> counts) {
  std::sort(counts.begin(), counts.end());
  std::int64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log(p);
  }
  return h;
}

/// Histogram of the entries of w over `bins` equal-width bins spanning [min(w), max(w)].
template <typename Derived>
std::vector<std::int64_t> value_histogram(const Eigen::DenseBase<Derived>& w, int bins) {
  std::vector<std::int64_t> counts(bins, 0);
  const double lo = w.minCoeff();
  const double hi = w.maxCoeff();
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) ++counts[bin_index(w(i, j), lo, hi, bins)];
  }
  return counts;
}

/// Bin entropy of a weight matrix, in [0, ln B]. A constant matrix has entropy 0.
/// Throws EmptyMatrix.
template <typename Derived>
double matrix_entropy(const Eigen::DenseBase<Derived>& w, const EntropyConfig& cfg = {}) {
  cfg.validate();
  if (w.size() == 0) throw Error(ErrorKind::EmptyMatrix, "entropy of an empty matrix");
  return histogram_entropy(value_histogram(w, cfg.num_bins));
}

/// Pearson correlation of two equally long vectors; 0 if either has zero variance.
template <typename A, typename B>
double pearson(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) {
  const auto xc = (x.array() - x.mean()).matrix().eval();
  const auto yc = (y.array() - y.mean()).matrix().eval();
  const double sx = xc.norm();
  const double sy = yc.norm();
  if (sx == 0.0 || sy == 0.0) return 0.0;
  return xc.dot(yc) / (sx * sy);
}

}  // namespace viewx
