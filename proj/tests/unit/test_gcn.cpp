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

#include <cmath>
#include <numeric>

#include "doctest.h"
#include "unit/fixtures.hpp"
#include "viewx/error.hpp"
#include "viewx/gcn.hpp"

using namespace viewx;

namespace {

GnnModel with_layers(const ModelSpec& spec, std::vector<LayerParams> layers) {
  return GnnModel(spec, std::move(layers), 0);
}

double loss_of(const GnnModel& m, const GraphView& v, const Graph& g) {
  return masked_cross_entropy(predict(m, v), g.labels, g.train_mask);
}

}  // namespace

TEST_CASE("init_model") {
  ModelSpec spec{{4, 3}, 0.0};
  GnnModel m = init_model(spec, 17);
  REQUIRE(m.layer(0).weight.rows() == 4);
  REQUIRE(m.layer(0).weight.cols() == 3);
  CHECK(m.layer(0).weight.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 7.0));
  CHECK(m.layer(0).bias.isZero(0.0));
  CHECK(init_model(spec, 17) == m);
  CHECK_FALSE(init_model(spec, 18) == m);
  CHECK(init_model(ModelSpec::gcn(10, 16, 7), 1).parameter_count() == 10 * 16 + 16 + 16 * 7 + 7);
}

TEST_CASE("forward examples") {
  Rng rng(0);
  SUBCASE("single node identity layer") {
    Graph g = build_graph(1, {}, Matrix::Constant(1, 1, 2.0), {0}, {{0}, {}, {}}, 1);
    GraphView v = identity_view(g);
    ModelSpec spec{{1, 1}, 0.0};
    LayerParams p{Matrix::Constant(1, 1, 1.0), Vector::Zero(1)};
    CHECK(predict(with_layers(spec, {p}), v)(0, 0) == 2.0);
  }
  SUBCASE("zero weights give the bias") {
    Graph g = testing::random_graph(6, 3, 2, 0.5, rng);
    GraphView v = identity_view(g);
    ModelSpec spec{{3, 4, 2}, 0.0};
    Vector b(2);
    b << 0.25, -1.5;
    GnnModel m = with_layers(spec, {LayerParams{Matrix::Zero(3, 4), Vector::Zero(4)},
                                    LayerParams{Matrix::Zero(4, 2), b}});
    const Matrix logits = predict(m, v);
    for (int i = 0; i < 6; ++i) CHECK(logits.row(i) == b.transpose());
  }
  SUBCASE("triangle with constant features gives identical rows") {
    Graph g = testing::triangle(3);
    GraphView v = identity_view(g);
    const Matrix logits = predict(init_model(ModelSpec::gcn(3, 5, 2, 3, 0.0), 3), v);
    CHECK(logits.row(0) == logits.row(1));
    CHECK(logits.row(1) == logits.row(2));
  }
  SUBCASE("feature width mismatch") {
    Graph g = testing::triangle(3);
    GraphView v = identity_view(g);
    CHECK_THROWS_AS(predict(init_model(ModelSpec::gcn(4, 5, 2), 3), v), Error);
  }
}

TEST_CASE("masked_cross_entropy examples") {
  const std::vector<int> labels = {0, 3, 6};
  const NodeMask all = {true, true, true};
  CHECK(masked_cross_entropy(Matrix::Zero(3, 7), labels, all) == doctest::Approx(std::log(7.0)));

  Matrix sure = Matrix::Zero(3, 7);
  for (int i = 0; i < 3; ++i) sure(i, labels[i]) = 1000.0;
  CHECK(masked_cross_entropy(sure, labels, all) < 1e-12);

  // Node 0: two classes, uniform -> ln 2. Node 1: eight classes, uniform -> ln 8.
  Matrix two(2, 8);
  two.row(0) << 0, 0, -1e4, -1e4, -1e4, -1e4, -1e4, -1e4;
  two.row(1).setZero();
  const double loss = masked_cross_entropy(two, std::vector<int>{0, 5}, NodeMask{true, true});
  CHECK(loss == doctest::Approx(std::log(4.0)).epsilon(1e-12));

  CHECK_THROWS_AS(masked_cross_entropy(Matrix::Zero(3, 7), labels, NodeMask(3, false)), Error);
}

TEST_CASE("softmax rows sum to one and loss is nonnegative") {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    Matrix logits = testing::random_matrix(5, 4, rng) * 20.0;
    Matrix p = softmax(logits);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(p.row(i).sum() - 1.0) < 1e-12);
    std::vector<int> labels(5);
    for (auto& y : labels) y = static_cast<int>(rng.below(4));
    CHECK(masked_cross_entropy(logits, labels, NodeMask(5, true)) >= 0.0);
  }
}

TEST_CASE("gradient matches central differences") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(8));
    const int d = 1 + static_cast<int>(rng.below(6));
    const int c = 2 + static_cast<int>(rng.below(3));
    Graph g = testing::random_graph(n, d, c, 0.4, rng);
    GraphView v = identity_view(g);
    const int depth = 2 + static_cast<int>(rng.below(2));
    GnnModel m = init_model(ModelSpec::gcn(d, 1 + static_cast<int>(rng.below(5)), c, depth, 0.0), trial);
    for (int l = 0; l < m.num_layers(); ++l) {
      LayerParams& p = m.mutable_layer(l);
      for (int k = 0; k < p.bias.size(); ++k) p.bias(k) = 0.1 * rng.normal();
    }
    Rng frng(0);
    const Gradients grads = backward(forward(m, v, true, frng), g.labels, g.train_mask);
    const double h = 1e-5;
    double worst = 0.0;
    for (int l = 0; l < m.num_layers(); ++l) {
      auto probe = [&](auto getter, double analytic) {
        GnnModel plus = m, minus = m;
        getter(plus.mutable_layer(l)) += h;
        getter(minus.mutable_layer(l)) -= h;
        const double numeric = (loss_of(plus, v, g) - loss_of(minus, v, g)) / (2 * h);
        const double err = std::abs(numeric - analytic) / std::max(1.0, std::abs(numeric) + std::abs(analytic));
        worst = std::max(worst, err);
      };
      for (int i = 0; i < grads[l].weight.rows(); ++i) {
        for (int j = 0; j < grads[l].weight.cols(); ++j) {
          probe([&](LayerParams& p) -> double& { return p.weight(i, j); }, grads[l].weight(i, j));
        }
      }
      for (int j = 0; j < grads[l].bias.size(); ++j) {
        probe([&](LayerParams& p) -> double& { return p.bias(j); }, grads[l].bias(j));
      }
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("backward edge cases") {
  SUBCASE("saturated correct logits give a vanishing gradient") {
    Graph g = build_graph(1, {}, Matrix::Constant(1, 1, 1.0), {0}, {{0}, {}, {}}, 2);
    GraphView v = identity_view(g);
    ModelSpec spec{{1, 2}, 0.0};
    Vector b(2);
    b << 50.0, -50.0;
    GnnModel m = with_layers(spec, {LayerParams{Matrix::Zero(1, 2), b}});
    Rng rng(0);
    const Gradients grads = backward(forward(m, v, false, rng), g.labels, g.train_mask);
    CHECK(grads[0].weight.norm() + grads[0].bias.norm() < 1e-8);
  }
  SUBCASE("an isolated unmasked node contributes nothing") {
    // Node 2 is isolated and unmasked; changing its features leaves the gradient unchanged.
    Matrix x(3, 2);
    x << 1, 0, 0, 1, 3, -2;
    Graph a = build_graph(3, {{0, 1}}, x, {0, 1, 0}, {{0, 1}, {}, {}}, 2);
    x.row(2) << -7, 9;
    Graph b = build_graph(3, {{0, 1}}, x, {0, 1, 0}, {{0, 1}, {}, {}}, 2);
    GnnModel m = init_model(ModelSpec::gcn(2, 3, 2, 2, 0.0), 4);
    GraphView va = identity_view(a), vb = identity_view(b);
    Rng rng(0);
    const Gradients ga = backward(forward(m, va, false, rng), a.labels, a.train_mask);
    const Gradients gb = backward(forward(m, vb, false, rng), b.labels, b.train_mask);
    for (int l = 0; l < 2; ++l) {
      CHECK(ga[l].weight == gb[l].weight);
      CHECK(ga[l].bias == gb[l].bias);
    }
  }
  SUBCASE("stale cache") {
    Graph g = testing::triangle();
    GraphView v = identity_view(g);
    GnnModel m = init_model(ModelSpec::gcn(2, 3, 2), 1);
    Rng rng(0);
    ForwardCache cache = forward(m, v, true, rng);
    m.mutable_layer(0).weight(0, 0) += 1.0;
    try {
      backward(cache, g.labels, g.train_mask);
      FAIL("expected StaleCache");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::StaleCache);
    }
  }
}

TEST_CASE("forward is equivariant under node relabeling") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(10));
    Graph g = testing::random_graph(n, 3, 3, 0.3, rng);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    EdgeList edges;
    for (auto [u, v] : g.edges) edges.emplace_back(perm[u], perm[v]);
    Matrix x(n, 3);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
      x.row(perm[i]) = g.features.row(i);
      labels[perm[i]] = g.labels[i];
    }
    Graph pg = build_graph(n, edges, x, labels, {{perm[0]}, {}, {}}, 3);
    GnnModel m = init_model(ModelSpec::gcn(3, 4, 3, 3, 0.0), trial);
    const Matrix a = predict(m, identity_view(g));
    const Matrix b = predict(m, identity_view(pg));
    for (int i = 0; i < n; ++i) CHECK((a.row(i) - b.row(perm[i])).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("adam_step examples") {
  ModelSpec spec{{1, 1}, 0.0};
  const std::vector<double> no_decay = {0.0};
  auto scalar_model = [&](double w) {
    return with_layers(spec, {LayerParams{Matrix::Constant(1, 1, w), Vector::Zero(1)}});
  };
  auto scalar_grad = [](double g) {
    return Gradients{LayerParams{Matrix::Constant(1, 1, g), Vector::Zero(1)}};
  };

  GnnModel m = scalar_model(0.5);
  AdamState state = make_adam_state(m);
  adam_step(m, scalar_grad(0.0), state, 0.01, no_decay, 1);
  CHECK(m.layer(0).weight(0, 0) == 0.5);

  for (double g : {3.0, -0.2}) {
    GnnModel s = scalar_model(1.0);
    AdamState st = make_adam_state(s);
    adam_step(s, scalar_grad(g), st, 0.01, no_decay, 1);
    const double step = 1.0 - s.layer(0).weight(0, 0);
    // m_hat / (sqrt(v_hat) + eps) = |g| / (|g| + eps) * sign(g)
    CHECK(step == doctest::Approx(0.01 * std::copysign(1.0, g)).epsilon(1e-6));
    const double after_one = s.layer(0).weight(0, 0);
    adam_step(s, scalar_grad(g), st, 0.01, no_decay, 2);
    CHECK((s.layer(0).weight(0, 0) - after_one) * g < 0.0);
  }

  // Weight decay enters through the gradient.
  GnnModel d = scalar_model(2.0);
  AdamState sd = make_adam_state(d);
  const std::vector<double> decay = {0.1};
  adam_step(d, scalar_grad(0.0), sd, 0.01, decay, 1);
  CHECK(d.layer(0).weight(0, 0) == doctest::Approx(1.99).epsilon(1e-9));
}

TEST_CASE("argmax and accuracy") {
  Matrix flat = Matrix::Zero(4, 3);
  CHECK(argmax_rows(flat) == std::vector<int>{0, 0, 0, 0});
  const std::vector<int> zeros(4, 0);
  CHECK(accuracy(argmax_rows(flat), zeros, NodeMask(4, true)) == 1.0);
  Matrix onehot = Matrix::Identity(3, 3);
  CHECK(accuracy(argmax_rows(onehot), std::vector<int>{0, 1, 2}, NodeMask(3, true)) == 1.0);
  CHECK_THROWS_AS(accuracy(zeros, zeros, NodeMask(4, false)), Error);

  // An uninformative model on random 7-class labels scores about 1/7.
  Rng rng(12);
  const int n = 20000;
  std::vector<int> labels(n);
  for (auto& y : labels) y = static_cast<int>(rng.below(7));
  const double acc = accuracy(std::vector<int>(n, 0), labels, NodeMask(n, true));
  CHECK(std::abs(acc - 1.0 / 7.0) < 0.01);
}
