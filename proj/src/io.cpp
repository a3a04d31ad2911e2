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

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "viewx/error.hpp"
#include "viewx/io.hpp"

namespace viewx {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorKind::ParseError, where + ": expected an object");
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw Error(ErrorKind::ParseError, where + ": unknown field '" + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  try {
    reject_unknown(j,
                   {"hidden", "depth", "dropout", "normalize_features", "num_views", "retrain_on_original", "seeds", "method", "train",
                    "augment", "exchange"},
                   "config");
    read(j, "hidden", cfg.hidden);
    read(j, "depth", cfg.depth);
    read(j, "dropout", cfg.dropout);
    read(j, "normalize_features", cfg.normalize_features);
    read(j, "num_views", cfg.num_views);
    read(j, "retrain_on_original", cfg.retrain_on_original);
    if (j.contains("seeds")) {
      const json& s = j.at("seeds");
      cfg.seeds = s.is_array() ? s.get<std::vector<std::uint64_t>>()
                               : std::vector<std::uint64_t>{s.get<std::uint64_t>()};
    }
    if (j.contains("method")) cfg.method = parse_method(j.at("method").get<std::string>());

    if (j.contains("train")) {
      const json& t = j.at("train");
      reject_unknown(t,
                     {"epochs", "lr", "weight_decay", "layer_weight_decay", "decay_first_layer_only",
                      "tolerance_metric", "tolerance_num", "dropout_rate", "seed"},
                     "config.train");
      read(t, "epochs", cfg.train.epochs);
      read(t, "lr", cfg.train.lr);
      read(t, "weight_decay", cfg.train.weight_decay);
      read(t, "layer_weight_decay", cfg.train.layer_weight_decay);
      read(t, "decay_first_layer_only", cfg.train.decay_first_layer_only);
      if (t.contains("tolerance_metric")) {
        cfg.train.tolerance_metric = parse_tolerance_metric(t.at("tolerance_metric").get<std::string>());
      }
      read(t, "tolerance_num", cfg.train.tolerance_num);
      if (t.contains("dropout_rate") && !t.at("dropout_rate").is_null()) {
        cfg.train.dropout_rate = t.at("dropout_rate").get<double>();
      }
      read(t, "seed", cfg.train.seed);
    }
    if (j.contains("augment")) {
      const json& a = j.at("augment");
      reject_unknown(a, {"p_mask", "p_corrupt", "p_drop_edge", "p_subgraph", "seed"}, "config.augment");
      read(a, "p_mask", cfg.augment.p_mask);
      read(a, "p_corrupt", cfg.augment.p_corrupt);
      read(a, "p_drop_edge", cfg.augment.p_drop_edge);
      read(a, "p_subgraph", cfg.augment.p_subgraph);
      read(a, "seed", cfg.augment.seed);
    }
    if (j.contains("exchange")) {
      const json& e = j.at("exchange");
      reject_unknown(e, {"iterations", "channels_per_layer", "strategy", "num_bins", "layers"},
                     "config.exchange");
      read(e, "iterations", cfg.exchange.iterations);
      read(e, "channels_per_layer", cfg.exchange.channels_per_layer);
      if (e.contains("strategy")) cfg.exchange.strategy = parse_strategy(e.at("strategy").get<std::string>());
      read(e, "num_bins", cfg.exchange.entropy.num_bins);
      read(e, "layers", cfg.exchange.layers);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json train = {{"epochs", cfg.train.epochs},
                {"lr", cfg.train.lr},
                {"weight_decay", cfg.train.weight_decay},
                {"layer_weight_decay", cfg.train.layer_weight_decay},
                {"decay_first_layer_only", cfg.train.decay_first_layer_only},
                {"tolerance_metric", std::string(to_string(cfg.train.tolerance_metric))},
                {"tolerance_num", cfg.train.tolerance_num},
                {"dropout_rate", nullptr},
                {"seed", cfg.train.seed}};
  if (cfg.train.dropout_rate) train["dropout_rate"] = *cfg.train.dropout_rate;
  return {{"hidden", cfg.hidden},
          {"depth", cfg.depth},
          {"dropout", cfg.dropout},
          {"normalize_features", cfg.normalize_features},
          {"num_views", cfg.num_views},
          {"retrain_on_original", cfg.retrain_on_original},
          {"seeds", cfg.seeds},
          {"method", std::string(to_string(cfg.method))},
          {"train", train},
          {"augment",
           {{"p_mask", cfg.augment.p_mask},
            {"p_corrupt", cfg.augment.p_corrupt},
            {"p_drop_edge", cfg.augment.p_drop_edge},
            {"p_subgraph", cfg.augment.p_subgraph},
            {"seed", cfg.augment.seed}}},
          {"exchange",
           {{"iterations", cfg.exchange.iterations},
            {"channels_per_layer", cfg.exchange.channels_per_layer},
            {"strategy", std::string(to_string(cfg.exchange.strategy))},
            {"num_bins", cfg.exchange.entropy.num_bins},
            {"layers", cfg.exchange.layers}}}};
}

ExperimentConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorKind::MissingFile, path.string() + " not found");
  std::ifstream in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::vector<ResultsRow> to_rows(const ExperimentResult& result, const std::string& run_id,
                                const std::string& dataset, int depth, int labels_per_class) {
  std::vector<ResultsRow> rows;
  for (const SeedResult& r : result.runs) {
    ResultsRow row;
    row.run_id = run_id;
    row.dataset = dataset;
    row.method = std::string(to_string(result.method));
    row.strategy = result.strategy ? std::string(to_string(*result.strategy)) : "none";
    row.seed = r.seed;
    row.depth = depth;
    row.labels_per_class = labels_per_class;
    row.epochs_used = r.epochs_used;
    row.val_accuracy = r.val_accuracy;
    row.test_accuracy = r.test_accuracy;
    row.wall_ms = r.wall_ms;
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void check_field(const std::string& s) {
  if (s.find_first_of(",\n\r#") != std::string::npos) {
    throw Error(ErrorKind::InvalidArgument, "results field '" + s + "' contains a reserved character");
  }
}

}  // namespace

std::string format_results(const std::vector<ResultsRow>& rows) {
  std::ostringstream os;
  os << kResultsHeader << "\n";
  // Accuracies are percentages.
  for (const ResultsRow& r : rows) {
    for (const auto* s : {&r.run_id, &r.dataset, &r.method, &r.strategy}) check_field(*s);
    os << r.run_id << ',' << r.dataset << ',' << r.method << ',' << r.strategy << ',' << r.seed << ','
       << r.depth << ',' << r.labels_per_class << ',' << r.epochs_used << ',' << fixed(r.val_accuracy, 4)
       << ',' << fixed(r.test_accuracy, 4) << ',' << fixed(r.wall_ms, 1) << "\n";
  }
  using Key = std::tuple<std::string, std::string, int, int>;
  std::map<Key, std::vector<double>> groups;
  std::vector<Key> order;
  for (const ResultsRow& r : rows) {
    Key key{r.method, r.strategy, r.depth, r.labels_per_class};
    if (!groups.contains(key)) order.push_back(key);
    groups[key].push_back(r.test_accuracy);
  }
  for (const Key& key : order) {
    const auto& values = groups[key];
    auto [mean, sd] = mean_std(values);
    os << "# " << std::get<0>(key) << " strategy=" << std::get<1>(key) << " depth=" << std::get<2>(key)
       << " labels_per_class=" << std::get<3>(key) << " n=" << values.size() << " test_accuracy="
       << fixed(mean, 4) << "±" << fixed(sd, 4) << "\n";
  }
  return os.str();
}

void write_results(const std::vector<ResultsRow>& rows, const fs::path& path) {
  if (rows.empty()) throw Error(ErrorKind::InvalidArgument, "no result rows to write");
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << format_results(rows);
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

std::vector<ResultsRow> parse_results(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header = false;
  std::vector<ResultsRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != kResultsHeader) throw Error(ErrorKind::ParseError, "results: unexpected header");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 11) {
      throw Error(ErrorKind::ParseError, "results:" + std::to_string(line_no) + ": expected 11 fields");
    }
    try {
      ResultsRow r;
      r.run_id = f[0];
      r.dataset = f[1];
      r.method = f[2];
      r.strategy = f[3];
      r.seed = std::stoull(f[4]);
      r.depth = std::stoi(f[5]);
      r.labels_per_class = std::stoi(f[6]);
      r.epochs_used = std::stoi(f[7]);
      r.val_accuracy = std::stod(f[8]);
      r.test_accuracy = std::stod(f[9]);
      r.wall_ms = std::stod(f[10]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::ParseError, "results:" + std::to_string(line_no) + ": bad number");
    }
  }
  if (!header) throw Error(ErrorKind::ParseError, "results: missing header");
  return rows;
}

void write_trace(const std::vector<ExchangeEvent>& events, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  for (const ExchangeEvent& e : events) out << e.to_json_line() << "\n";
}

}  // namespace viewx
