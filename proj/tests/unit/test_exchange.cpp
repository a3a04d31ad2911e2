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
#include <limits>

#include "doctest.h"
#include "unit/fixtures.hpp"
#include "viewx/error.hpp"
#include "viewx/exchange.hpp"

using namespace viewx;

namespace {

/// Exhaustive scan over unordered column pairs with the plain Pearson formula.
ChannelPair oracle_pair(const Matrix& w) {
  ChannelPair best{0, 1, -std::numeric_limits<double>::infinity()};
  for (int a = 0; a < w.cols(); ++a) {
    for (int b = a + 1; b < w.cols(); ++b) {
      const double r = pearson(w.col(a), w.col(b));
      if (r > best.correlation + 1e-12) best = {a, b, r};
    }
  }
  return best;
}

/// Entropy of every substitution, built by copying the matrix and rebinning it from scratch.
Substitution oracle_select(const Matrix& source, const Matrix& target, int idx1, int idx2, int bins) {
  Substitution best{-1, -1, -1.0};
  for (int i = 0; i < source.cols(); ++i) {
    for (int r : {std::min(idx1, idx2), std::max(idx1, idx2)}) {
      Matrix t = target;
      t.col(r) = source.col(i);
      const double lo = t.minCoeff(), hi = t.maxCoeff();
      std::vector<std::int64_t> counts(bins, 0);
      for (int k = 0; k < t.size(); ++k) {
        int b = hi > lo ? static_cast<int>((t.data()[k] - lo) / (hi - lo) * bins) : 0;
        counts[std::clamp(b, 0, bins - 1)]++;
      }
      const double h = histogram_entropy(counts);
      if (h > best.entropy) best = {i, r, h};
    }
  }
  return best;
}

std::pair<GnnModel, GnnModel> model_pair(const ModelSpec& spec, std::uint64_t seed) {
  return {init_model(spec, seed), init_model(spec, seed + 1000)};
}

}  // namespace

TEST_CASE("most_correlated_pair examples") {
  Matrix w(3, 3);
  w << 1, 2, 3, 2, 4, 2, 3, 6, 1;
  ChannelPair p = most_correlated_pair(w, Axis::Output);
  CHECK(p.idx1 == 0);
  CHECK(p.idx2 == 1);
  CHECK(p.correlation == doctest::Approx(1.0).epsilon(1e-15));

  Matrix two(3, 2);
  two << 1, 3, 2, 2, 3, 1;
  p = most_correlated_pair(two, Axis::Output);
  CHECK(p.idx1 == 0);
  CHECK(p.idx2 == 1);
  CHECK(p.correlation == doctest::Approx(-1.0).epsilon(1e-15));

  CHECK_THROWS_AS(most_correlated_pair(Matrix::Zero(4, 1), Axis::Output), Error);
  // Input axis reads rows.
  p = most_correlated_pair(Matrix(w.transpose()), Axis::Input);
  CHECK(p.idx1 == 0);
  CHECK(p.idx2 == 1);
}

TEST_CASE("most_correlated_pair matches an exhaustive scan") {
  Rng rng(40);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix w = testing::random_matrix(16, 8, rng);
    if (trial % 10 == 0) w.col(3).setConstant(1.0);  // zero-variance channel
    const ChannelPair p = most_correlated_pair(w, Axis::Output);
    const ChannelPair o = oracle_pair(w);
    CHECK(p.idx1 == o.idx1);
    CHECK(p.idx2 == o.idx2);
    CHECK(std::abs(p.correlation - o.correlation) < 1e-12);
  }
}

TEST_CASE("select_exchange examples") {
  // Target columns 0 and 1 are identical; source column 2 fills the empty upper bins.
  Matrix target(4, 3), source(4, 3);
  target << 0, 0, 0.1, 0.1, 0.1, 0.2, 0.2, 0.2, 0.3, 1.0, 1.0, 0.4;
  source << 0, 0.1, 0.5, 0, 0.1, 0.6, 0, 0.1, 0.7, 0, 0.1, 0.8;
  const EntropyConfig cfg{10};
  const Substitution s = select_exchange(source, target, 0, 1, cfg);
  const Substitution o = oracle_select(source, target, 0, 1, 10);
  CHECK(s.source_channel == 2);
  CHECK(s.source_channel == o.source_channel);
  CHECK(s.target_channel == o.target_channel);

  // Every substitution yields the same entropy: first i, smaller r.
  const Matrix flat = Matrix::Constant(4, 5, 2.0);
  const Substitution tie = select_exchange(flat, flat, 3, 1, cfg);
  CHECK(tie.source_channel == 0);
  CHECK(tie.target_channel == 1);

  CHECK_THROWS_AS(select_exchange(Matrix::Zero(4, 3), Matrix::Zero(3, 3), 0, 1, cfg), Error);
  CHECK_THROWS_AS(select_exchange(flat, flat, 0, 7, cfg), Error);
}

TEST_CASE("select_exchange matches an exhaustive enumerator") {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = 2 + static_cast<int>(rng.below(7));
    const int cols = 2 + static_cast<int>(rng.below(7));
    const int bins = 2 + static_cast<int>(rng.below(30));
    Matrix s = testing::random_matrix(rows, cols, rng);
    Matrix t = testing::random_matrix(rows, cols, rng);
    if (trial % 4 == 0) s *= 3.0;  // candidates that widen the range
    const int idx1 = static_cast<int>(rng.below(cols));
    int idx2 = static_cast<int>(rng.below(cols - 1));
    if (idx2 >= idx1) ++idx2;
    const Substitution got = select_exchange(s, t, idx1, idx2, EntropyConfig{bins});
    const Substitution want = oracle_select(s, t, idx1, idx2, bins);
    CHECK(got.source_channel == want.source_channel);
    CHECK(got.target_channel == want.target_channel);
    CHECK(got.entropy == want.entropy);
  }
}

TEST_CASE("swap_channels") {
  const ModelSpec spec = ModelSpec::gcn(5, 4, 3, 3, 0.0);
  auto [a, b] = model_pair(spec, 1);
  for (int l = 0; l < 3; ++l) b.mutable_layer(l).bias.setRandom();
  const GnnModel a0 = a, b0 = b;

  swap_channels(a, b, 1, 0, 2, Axis::Output);
  CHECK(a.layer(1).weight.col(0) == b0.layer(1).weight.col(2));
  CHECK(b.layer(1).weight.col(2) == a0.layer(1).weight.col(0));
  CHECK(a.layer(1).bias(0) == b0.layer(1).bias(2));
  CHECK(b.layer(1).bias(2) == a0.layer(1).bias(0));
  swap_channels(a, b, 1, 0, 2, Axis::Output);
  CHECK(a == a0);
  CHECK(b == b0);

  swap_channels(a, b, 0, 4, 1, Axis::Input);
  CHECK(a.layer(0).weight.row(4) == b0.layer(0).weight.row(1));
  CHECK(a.layer(0).bias == a0.layer(0).bias);
  swap_channels(a, b, 0, 4, 1, Axis::Input);
  CHECK(a == a0);

  GnnModel c = a0, d = a0;
  swap_channels(c, d, 2, 1, 1, Axis::Output);
  CHECK(c == a0);
  CHECK(d == a0);

  CHECK_THROWS_AS(swap_channels(a, b, 0, 9, 0, Axis::Output), Error);
  GnnModel other = init_model(ModelSpec::gcn(5, 6, 3, 3, 0.0), 3);
  CHECK_THROWS_AS(swap_channels(a, other, 0, 0, 0, Axis::Output), Error);

  // The union multiset survives any sequence of swaps.
  Rng rng(42);
  const auto before = testing::sorted_parameters({&a, &b});
  for (int k = 0; k < 100; ++k) {
    const int l = static_cast<int>(rng.below(3));
    const Axis axis = rng.bernoulli(0.5) ? Axis::Output : Axis::Input;
    const int count = static_cast<int>(axis == Axis::Output ? a.layer(l).weight.cols() : a.layer(l).weight.rows());
    swap_channels(a, b, l, static_cast<int>(rng.below(count)), static_cast<int>(rng.below(count)), axis);
  }
  CHECK(testing::sorted_parameters({&a, &b}) == before);
}

TEST_CASE("adaptive exchange is locally optimal at every step") {
  Rng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    auto [s, t] = model_pair(ModelSpec::gcn(6, 8, 5, 2, 0.0), trial);
    ExchangeConfig cfg;
    cfg.channels_per_layer = 1 + static_cast<int>(rng.below(5));
    for (int l = 0; l < 2; ++l) {
      // Replay each step against the oracle on copies.
      GnnModel s_copy = s, t_copy = t;
      auto events = exchange_layer(s, t, l, cfg, rng);
      REQUIRE(events.size() == static_cast<std::size_t>(cfg.channels_per_layer));
      for (const ExchangeEvent& e : events) {
        const ChannelPair pair = oracle_pair(t_copy.layer(l).weight);
        CHECK(e.idx1 == pair.idx1);
        CHECK(e.idx2 == pair.idx2);
        CHECK((e.target_channel == e.idx1 || e.target_channel == e.idx2));
        const Substitution want = oracle_select(s_copy.layer(l).weight, t_copy.layer(l).weight, pair.idx1,
                                                pair.idx2, cfg.entropy.num_bins);
        CHECK(e.source_channel == want.source_channel);
        CHECK(e.target_channel == want.target_channel);
        CHECK(e.entropy_after >= want.entropy - 1e-12);
        CHECK(e.entropy_before == matrix_entropy(t_copy.layer(l).weight, cfg.entropy));
        swap_channels(s_copy, t_copy, l, e.source_channel, e.target_channel, Axis::Output);
      }
      CHECK(s_copy == s);
      CHECK(t_copy == t);
    }
  }
}

TEST_CASE("every strategy moves the same number of weights") {
  // C_in = 16 and C_out = 8 divide evenly, so the input budget is exact.
  const ModelSpec spec{{12, 16, 8}, 0.0};
  ExchangeConfig cfg;
  cfg.channels_per_layer = 3;
  for (ExchangeStrategy strategy : all_strategies()) {
    cfg.strategy = strategy;
    auto [s, t] = model_pair(spec, 5);
    Rng rng(1);
    std::int64_t moved = 0;
    for (const auto& e : exchange_layer(s, t, 1, cfg, rng)) moved += e.scalars_moved;
    CHECK_MESSAGE(moved == 3 * 16, to_string(strategy));
  }
  CHECK(input_channel_budget(5, 16, 7) == 12);
  CHECK(input_channel_budget(3, 16, 8) == 6);
}

TEST_CASE("conservation under every swapping strategy") {
  Rng rng(44);
  for (ExchangeStrategy strategy : all_strategies()) {
    if (strategy == ExchangeStrategy::RandomInitPartner || strategy == ExchangeStrategy::SelfExchange) continue;
    for (int trial = 0; trial < 5; ++trial) {
      auto [s, t] = model_pair(ModelSpec::gcn(9, 8, 4, 3, 0.0), trial);
      for (int l = 0; l < 3; ++l) s.mutable_layer(l).bias.setRandom();
      const auto before = testing::sorted_parameters({&s, &t});
      ExchangeConfig cfg;
      cfg.strategy = strategy;
      cfg.channels_per_layer = 1 + static_cast<int>(rng.below(4));
      for (int l = 0; l < 3; ++l) exchange_layer(s, t, l, cfg, rng);
      CHECK_MESSAGE(testing::sorted_parameters({&s, &t}) == before, to_string(strategy));
    }
  }
}

TEST_CASE("strategy specifics") {
  const ModelSpec spec = ModelSpec::gcn(6, 8, 4, 2, 0.0);
  ExchangeConfig cfg;
  cfg.channels_per_layer = 3;
  Rng rng(45);

  SUBCASE("self exchange leaves the source alone and permutes the target") {
    cfg.strategy = ExchangeStrategy::SelfExchange;
    auto [s, t] = model_pair(spec, 1);
    const GnnModel s0 = s, t0 = t;
    exchange_layer(s, t, 0, cfg, rng);
    CHECK(s == s0);
    CHECK(testing::sorted_parameters({&t}) == testing::sorted_parameters({&t0}));
  }
  SUBCASE("random-init partner leaves the source alone") {
    cfg.strategy = ExchangeStrategy::RandomInitPartner;
    auto [s, t] = model_pair(spec, 2);
    const GnnModel s0 = s, t0 = t;
    exchange_layer(s, t, 0, cfg, rng);
    CHECK(s == s0);
    CHECK_FALSE(t == t0);
  }
  SUBCASE("in-order swaps the leading channels") {
    cfg.strategy = ExchangeStrategy::InOrderOutput;
    auto [s, t] = model_pair(spec, 3);
    const GnnModel s0 = s, t0 = t;
    exchange_layer(s, t, 0, cfg, rng);
    CHECK(t.layer(0).weight.leftCols(3) == s0.layer(0).weight.leftCols(3));
    CHECK(t.layer(0).weight.rightCols(5) == t0.layer(0).weight.rightCols(5));
    cfg.channels_per_layer = 5;
    CHECK_THROWS_AS(exchange_layer(s, t, 1, cfg, rng), Error);  // 5 > 4 output channels
  }
  SUBCASE("mismatched architectures") {
    GnnModel a = init_model(spec, 1);
    GnnModel b = init_model(ModelSpec::gcn(6, 9, 4, 2, 0.0), 1);
    CHECK_THROWS_AS(exchange_layer(a, b, 0, cfg, rng), Error);
  }
}

TEST_CASE("schedule pairs") {
  auto seq = [](int k, int n) {
    std::vector<std::pair<int, int>> out;
    for (int i = 1; i <= n; ++i) out.push_back(schedule_pair(i, k));
    return out;
  };
  using P = std::vector<std::pair<int, int>>;
  CHECK(seq(2, 3) == P{{0, 1}, {1, 0}, {0, 1}});
  CHECK(seq(4, 4) == P{{0, 1}, {1, 2}, {2, 3}, {3, 0}});
}

TEST_CASE("run_schedule") {
  const ModelSpec spec = ModelSpec::gcn(6, 8, 4, 2, 0.0);
  std::vector<GnnModel> models;
  for (int k = 0; k < 4; ++k) models.push_back(init_model(spec, k));
  ExchangeConfig cfg;
  cfg.iterations = 4;
  cfg.channels_per_layer = 2;
  Rng rng(46);
  const auto events = run_schedule(models, cfg, rng);
  CHECK(events.size() == 4u * 2u * 2u);
  CHECK(events.front().source == 0);
  CHECK(events.front().target == 1);
  CHECK(events.back().source == 3);
  CHECK(events.back().target == 0);
  for (const auto& m : models) CHECK(m.spec() == spec);

  std::vector<GnnModel> one = {init_model(spec, 0)};
  CHECK_THROWS_AS(run_schedule(one, cfg, rng), Error);
  std::vector<GnnModel> mixed = {init_model(spec, 0), init_model(ModelSpec::gcn(6, 9, 4), 0)};
  CHECK_THROWS_AS(run_schedule(mixed, cfg, rng), Error);
  cfg.iterations = 0;
  CHECK_THROWS_AS(run_schedule(models, cfg, rng), Error);
}

TEST_CASE("trace lines are flat JSON objects") {
  ExchangeEvent e;
  e.layer = 1;
  e.source_channel = 3;
  const std::string line = e.to_json_line();
  CHECK(line.front() == '{');
  CHECK(line.back() == '}');
  CHECK(line.find("\"source_channel\":3") != std::string::npos);
  CHECK(line.find('\n') == std::string::npos);
}

TEST_CASE("strategy names round-trip") {
  for (ExchangeStrategy s : all_strategies()) CHECK(parse_strategy(to_string(s)) == s);
  CHECK(all_strategies().size() == 9);
  CHECK_THROWS_AS(parse_strategy("best"), Error);
}
