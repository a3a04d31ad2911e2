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

#include "viewx/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <sstream>
#include <thread>

#include "viewx/error.hpp"

namespace viewx {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

TrainConfig with_seed(const TrainConfig& cfg, std::uint64_t seed) {
  TrainConfig out = cfg;
  out.seed = seed;
  return out;
}

struct SeedContext {
  const Graph& graph;
  const ExperimentConfig& cfg;
  SeedPlan plan;
  GraphView eval_view;
  ModelSpec spec;

  SeedContext(const Graph& g, const ExperimentConfig& c, std::uint64_t seed)
      : graph(g), cfg(c), plan(seed), eval_view(identity_view(g)), spec(c.model_spec(g)) {}

  std::vector<GraphView> views() const {
    AugmentSpec augment = cfg.augment;
    augment.seed = plan.augment_seed();
    return generate_views(graph, augment, cfg.num_views);
  }

  TrainResult train_phase(GnnModel model, const GraphView& view, int k, int phase) const {
    return train(std::move(model), view, eval_view, with_seed(cfg.train, plan.train_seed(k, phase)));
  }

  void score(SeedResult& out, const GnnModel& model) const {
    out.val_accuracy = evaluate(model, eval_view, graph.val_mask);
    out.test_accuracy = evaluate(model, eval_view, graph.test_mask);
  }
};

template <typename PerSeed>
ExperimentResult run_seeds(const Graph& graph, const ExperimentConfig& cfg, Method method,
                           PerSeed per_seed) {
  cfg.validate();
  const auto start = Clock::now();
  ExperimentResult result;
  result.method = method;
  if (method == Method::AKE) result.strategy = cfg.exchange.strategy;
  result.fingerprint = cfg.fingerprint();
  result.runs.resize(cfg.seeds.size());
  parallel_for(static_cast<int>(cfg.seeds.size()), [&](int i) {
    const auto seed_start = Clock::now();
    SeedContext ctx(graph, cfg, cfg.seeds[i]);
    SeedResult r = per_seed(ctx);
    r.seed = cfg.seeds[i];
    r.wall_ms = elapsed_ms(seed_start);
    result.runs[i] = std::move(r);
  });
  result.summarize();
  result.wall_ms = elapsed_ms(start);
  return result;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Backbone: return "backbone";
    case Method::FT: return "ft";
    case Method::Ensemble: return "ensemble";
    case Method::EnsembleFT: return "ensemble-ft";
    case Method::AKE: return "ake";
  }
  return "unknown";
}

Method parse_method(std::string_view s) {
  for (Method m : {Method::Backbone, Method::FT, Method::Ensemble, Method::EnsembleFT, Method::AKE}) {
    if (to_string(m) == s) return m;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + std::string(s) + "'");
}

ModelSpec ExperimentConfig::model_spec(const Graph& g) const {
  return ModelSpec::gcn(g.num_features, hidden, g.num_classes, depth, dropout);
}

void ExperimentConfig::validate() const {
  if (hidden < 1) throw Error(ErrorKind::InvalidArgument, "hidden width must be >= 1");
  if (depth < 1) throw Error(ErrorKind::InvalidArgument, "depth must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw Error(ErrorKind::InvalidArgument, "dropout must be in [0, 1)");
  train.validate();
  augment.validate();
  exchange.validate();
  if (num_views < 2 && method != Method::Backbone) {
    throw Error(ErrorKind::TooFewViews, "multi-view methods need at least 2 views");
  }
  if (seeds.empty()) throw Error(ErrorKind::InvalidArgument, "no seeds given");
}

std::string ExperimentConfig::fingerprint() const {
  std::ostringstream os;
  os << std::setprecision(17) << "hidden=" << hidden << ";depth=" << depth << ";dropout=" << dropout
     << ";normalize=" << normalize_features << ";epochs=" << train.epochs << ";lr=" << train.lr << ";wd=" << train.weight_decay
     << ";wd_first_only=" << train.decay_first_layer_only << ";wd_layers=";
  for (double wd : train.layer_weight_decay) os << wd << ",";
  os << ";tol=" << to_string(train.tolerance_metric) << ":" << train.tolerance_num
     << ";augment=" << augment.p_mask << "," << augment.p_corrupt << "," << augment.p_drop_edge << ","
     << augment.p_subgraph << ";K=" << num_views << ";retrain_original=" << retrain_on_original << ";N=" << exchange.iterations
     << ";M=" << exchange.channels_per_layer << ";B=" << exchange.entropy.num_bins
     << ";strategy=" << to_string(exchange.strategy) << ";layers=";
  for (int l : exchange.layers) os << l << ",";
  os << ";method=" << to_string(method) << ";seeds=";
  for (auto s : seeds) os << s << ",";
  // FNV-1a
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : os.str()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << h;
  return hex.str();
}

std::pair<double, double> mean_std(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / values.size();
  if (values.size() < 2) return {mean, 0.0};
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / (values.size() - 1))};
}

void ExperimentResult::summarize() {
  std::vector<double> acc;
  for (const auto& r : runs) acc.push_back(r.test_accuracy);
  std::tie(mean, stddev) = mean_std(acc);
}

std::vector<int> majority_vote(const std::vector<std::vector<int>>& predictions, int num_classes) {
  if (predictions.empty()) return {};
  const std::size_t n = predictions.front().size();
  std::vector<int> out(n);
  std::vector<int> tally(num_classes);
  for (std::size_t v = 0; v < n; ++v) {
    std::fill(tally.begin(), tally.end(), 0);
    for (const auto& p : predictions) ++tally[p[v]];
    out[v] = static_cast<int>(std::max_element(tally.begin(), tally.end()) - tally.begin());
  }
  return out;
}

ExperimentResult run_backbone(const Graph& graph, const ExperimentConfig& cfg) {
  return run_seeds(graph, cfg, Method::Backbone, [](const SeedContext& ctx) {
    SeedResult r;
    TrainResult t = ctx.train_phase(init_model(ctx.spec, ctx.plan.init_seed(0)), ctx.eval_view, 0, 0);
    r.epochs_used = t.history.stop_epoch;
    r.epoch_budget = ctx.cfg.train.epochs;
    ctx.score(r, t.model);
    return r;
  });
}

ExperimentResult run_ake(const Graph& graph, const ExperimentConfig& cfg) {
  return run_seeds(graph, cfg, Method::AKE, [](const SeedContext& ctx) {
    const std::vector<GraphView> views = ctx.views();
    const int k = ctx.cfg.num_views;
    std::vector<GnnModel> models;
    std::vector<int> used(k, 0);
    for (int i = 0; i < k; ++i) {
      TrainResult t = ctx.train_phase(init_model(ctx.spec, ctx.plan.init_seed(i)), views[i], i, 0);
      used[i] = t.history.stop_epoch;
      models.push_back(std::move(t.model));
    }
    Rng rng(ctx.plan.exchange_seed());
    SeedResult r;
    r.events = run_schedule(models, ctx.cfg.exchange, rng);
    for (int i = 0; i < k; ++i) {
      const GraphView& input = ctx.cfg.retrain_on_original ? ctx.eval_view : views[i];
      TrainResult t = ctx.train_phase(std::move(models[i]), input, i, 1);
      used[i] += t.history.stop_epoch;
      models[i] = std::move(t.model);
    }
    r.epochs_used = used[0];
    r.epoch_budget = 2 * ctx.cfg.train.epochs;
    ctx.score(r, models[0]);
    return r;
  });
}

ExperimentResult run_ft(const Graph& graph, const ExperimentConfig& cfg) {
  return run_seeds(graph, cfg, Method::FT, [](const SeedContext& ctx) {
    const std::vector<GraphView> views = ctx.views();
    SeedResult best;
    best.val_accuracy = -1.0;
    for (int i = 0; i < ctx.cfg.num_views; ++i) {
      TrainResult first = ctx.train_phase(init_model(ctx.spec, ctx.plan.init_seed(i)), views[i], i, 0);
      TrainResult second = ctx.train_phase(std::move(first.model), views[i], i, 1);
      SeedResult r;
      ctx.score(r, second.model);
      r.epochs_used = first.history.stop_epoch + second.history.stop_epoch;
      r.epoch_budget = 2 * ctx.cfg.train.epochs;
      r.reported_view = i;
      if (r.val_accuracy > best.val_accuracy) best = r;
    }
    return best;
  });
}

ExperimentResult run_ensemble(const Graph& graph, const ExperimentConfig& cfg, bool further_train) {
  const Method method = further_train ? Method::EnsembleFT : Method::Ensemble;
  return run_seeds(graph, cfg, method, [further_train](const SeedContext& ctx) {
    const std::vector<GraphView> views = ctx.views();
    std::vector<std::vector<int>> votes;
    SeedResult r;
    for (int i = 0; i < ctx.cfg.num_views; ++i) {
      TrainResult t = ctx.train_phase(init_model(ctx.spec, ctx.plan.init_seed(i)), views[i], i, 0);
      int used = t.history.stop_epoch;
      if (further_train) {
        t = ctx.train_phase(std::move(t.model), views[i], i, 1);
        used += t.history.stop_epoch;
      }
      if (i == 0) r.epochs_used = used;
      votes.push_back(argmax_rows(predict(t.model, ctx.eval_view)));
    }
    const std::vector<int> voted = majority_vote(votes, ctx.graph.num_classes);
    r.val_accuracy = accuracy(voted, ctx.graph.labels, ctx.graph.val_mask);
    r.test_accuracy = accuracy(voted, ctx.graph.labels, ctx.graph.test_mask);
    r.epoch_budget = (further_train ? 2 : 1) * ctx.cfg.train.epochs;
    return r;
  });
}

ExperimentResult run_method(const Graph& graph, const ExperimentConfig& cfg) {
  switch (cfg.method) {
    case Method::Backbone: return run_backbone(graph, cfg);
    case Method::FT: return run_ft(graph, cfg);
    case Method::Ensemble: return run_ensemble(graph, cfg, false);
    case Method::EnsembleFT: return run_ensemble(graph, cfg, true);
    case Method::AKE: return run_ake(graph, cfg);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown method");
}

std::vector<ExperimentResult> ablation_sweep(const Graph& graph, const ExperimentConfig& cfg,
                                             const std::vector<ExchangeStrategy>& strategies) {
  if (strategies.empty()) throw Error(ErrorKind::InvalidArgument, "no strategies given");
  std::vector<ExperimentResult> out;
  for (ExchangeStrategy s : strategies) {
    ExperimentConfig c = cfg;
    c.method = Method::AKE;
    c.exchange.strategy = s;
    out.push_back(run_ake(graph, c));
  }
  return out;
}

std::vector<PairedPoint> depth_sweep(const Graph& graph, const ExperimentConfig& cfg,
                                     const std::vector<int>& depths) {
  std::vector<PairedPoint> out;
  for (int depth : depths) {
    if (depth < 2) throw Error(ErrorKind::InvalidArgument, "depth sweep needs depths >= 2");
    ExperimentConfig c = cfg;
    c.depth = depth;
    c.train.layer_weight_decay.clear();
    PairedPoint p;
    p.value = depth;
    p.backbone = run_backbone(graph, c);
    p.ake = run_ake(graph, c);
    out.push_back(std::move(p));
  }
  return out;
}

Graph resample_train_split(const Graph& graph, int per_class, std::uint64_t seed) {
  if (per_class < 1) throw Error(ErrorKind::InvalidArgument, "labels per class must be >= 1");
  std::vector<std::vector<NodeId>> pool(graph.num_classes);
  for (int v = 0; v < graph.num_nodes; ++v) {
    if (graph.labels[v] >= 0 && !graph.val_mask[v] && !graph.test_mask[v]) pool[graph.labels[v]].push_back(v);
  }
  Rng rng(seed);
  Graph out = graph;
  out.train_mask.assign(graph.num_nodes, false);
  for (int c = 0; c < graph.num_classes; ++c) {
    auto& nodes = pool[c];
    if (static_cast<int>(nodes.size()) < per_class) {
      throw Error(ErrorKind::InsufficientLabeledNodes,
                  "class " + std::to_string(c) + " has " + std::to_string(nodes.size()) +
                      " labeled nodes outside val/test, need " + std::to_string(per_class));
    }
    for (int k = 0; k < per_class; ++k) {
      const std::size_t j = k + rng.below(nodes.size() - k);
      std::swap(nodes[k], nodes[j]);
      out.train_mask[nodes[k]] = true;
    }
  }
  return out;
}

std::vector<PairedPoint> fewshot_sweep(const Graph& graph, const ExperimentConfig& cfg,
                                       const std::vector<int>& labels_per_class) {
  std::vector<PairedPoint> out;
  for (int budget : labels_per_class) {
    PairedPoint p;
    p.value = budget;
    p.backbone.method = Method::Backbone;
    p.ake.method = Method::AKE;
    p.ake.strategy = cfg.exchange.strategy;
    const auto start = Clock::now();
    for (std::uint64_t seed : cfg.seeds) {
      const Graph resampled = resample_train_split(graph, budget, SeedPlan(seed).fewshot_seed());
      ExperimentConfig c = cfg;
      c.seeds = {seed};
      ExperimentResult b = run_backbone(resampled, c);
      ExperimentResult a = run_ake(resampled, c);
      p.backbone.runs.push_back(b.runs.front());
      p.ake.runs.push_back(a.runs.front());
      p.backbone.fingerprint = b.fingerprint;
      p.ake.fingerprint = a.fingerprint;
    }
    p.backbone.summarize();
    p.ake.summarize();
    p.ake.wall_ms = p.backbone.wall_ms = elapsed_ms(start);
    out.push_back(std::move(p));
  }
  return out;
}

int worker_count() {
  int cap = 0;
  if (const char* env = std::getenv("AKE_THREADS")) cap = std::atoi(env);
  if (cap <= 0) cap = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(cap, 1);
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace viewx
