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

#include <charconv>
#include <fstream>
#include <sstream>

#include "viewx/error.hpp"
#include "viewx/io.hpp"

namespace viewx {
namespace fs = std::filesystem;
namespace {

std::ifstream open_input(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorKind::MissingFile, path.string() + " not found");
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return in;
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in = open_input(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
}

[[noreturn]] void parse_fail(const fs::path& path, int line, const std::string& why) {
  throw Error(ErrorKind::ParseError, path.filename().string() + ":" + std::to_string(line) + ": " + why);
}

template <typename T>
T parse_field(std::string_view field, const fs::path& path, int line) {
  T value{};
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) parse_fail(path, line, "bad value '" + std::string(field) + "'");
  return value;
}

/// Tab-separated fields of every non-empty line, with 1-based line numbers.
template <typename Fn>
void for_each_row(const fs::path& path, std::size_t columns, Fn fn) {
  std::ifstream in = open_input(path);
  std::string text;
  int line = 0;
  std::vector<std::string_view> fields;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;
    fields.clear();
    std::string_view rest(text);
    while (true) {
      const auto tab = rest.find('\t');
      fields.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (fields.size() != columns) {
      parse_fail(path, line, "expected " + std::to_string(columns) + " tab-separated fields, got " +
                                 std::to_string(fields.size()));
    }
    fn(fields, line);
  }
}

template <typename T>
T json_int(const nlohmann::json& j, const char* key, const fs::path& path) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    throw Error(ErrorKind::ParseError, path.filename().string() + ": missing integer field '" + key + "'");
  }
  return j[key].get<T>();
}

void count_check(const char* what, long long got, long long want) {
  if (got != want) {
    throw Error(ErrorKind::CountMismatch, std::string(what) + ": meta.json says " + std::to_string(want) +
                                              ", files have " + std::to_string(got));
  }
}

}  // namespace

Graph load_bundle(const fs::path& dir, BundleMeta* meta_out) {
  const fs::path meta_path = dir / "meta.json";
  const fs::path edges_path = dir / "edges.tsv";
  const fs::path features_path = dir / "features.tsv";
  const fs::path labels_path = dir / "labels.tsv";
  const fs::path split_path = dir / "split.json";
  for (const auto& p : {meta_path, edges_path, features_path, labels_path, split_path}) {
    if (!fs::exists(p)) throw Error(ErrorKind::MissingFile, p.string() + " not found");
  }

  const nlohmann::json meta_json = read_json(meta_path);
  BundleMeta meta;
  meta.name = meta_json.value("name", dir.filename().string());
  meta.num_nodes = json_int<int>(meta_json, "num_nodes", meta_path);
  meta.num_features = json_int<int>(meta_json, "num_features", meta_path);
  meta.num_classes = json_int<int>(meta_json, "num_classes", meta_path);
  if (meta_json.value("directed", false)) {
    throw Error(ErrorKind::ParseError, "meta.json: directed graphs are not supported");
  }
  const int n = meta.num_nodes;

  EdgeList edges;
  for_each_row(edges_path, 2, [&](const auto& f, int line) {
    const int u = parse_field<int>(f[0], edges_path, line);
    const int v = parse_field<int>(f[1], edges_path, line);
    if (u == v) {
      throw Error(ErrorKind::SelfLoopEdge, "edges.tsv:" + std::to_string(line) + ": self-loop on node " +
                                               std::to_string(u));
    }
    if (u < 0 || u >= n || v < 0 || v >= n) {
      throw Error(ErrorKind::OutOfRangeIndex, "edges.tsv:" + std::to_string(line) + ": node outside [0, " +
                                                  std::to_string(n) + ")");
    }
    edges.emplace_back(u, v);
  });

  Matrix features = Matrix::Zero(n, meta.num_features);
  for_each_row(features_path, 3, [&](const auto& f, int line) {
    const int node = parse_field<int>(f[0], features_path, line);
    const int feat = parse_field<int>(f[1], features_path, line);
    const double value = parse_field<double>(f[2], features_path, line);
    if (node < 0 || node >= n || feat < 0 || feat >= meta.num_features) {
      throw Error(ErrorKind::CountMismatch,
                  "features.tsv:" + std::to_string(line) + ": entry (" + std::to_string(node) + ", " +
                      std::to_string(feat) + ") outside the " + std::to_string(n) + " x " +
                      std::to_string(meta.num_features) + " matrix");
    }
    features(node, feat) = value;
  });

  std::vector<int> labels(n, -1);
  std::vector<bool> seen(n, false);
  int label_rows = 0;
  for_each_row(labels_path, 2, [&](const auto& f, int line) {
    const int node = parse_field<int>(f[0], labels_path, line);
    const int y = parse_field<int>(f[1], labels_path, line);
    ++label_rows;
    if (node < 0 || node >= n) {
      throw Error(ErrorKind::CountMismatch, "labels.tsv:" + std::to_string(line) + ": node " +
                                                std::to_string(node) + " outside [0, " + std::to_string(n) + ")");
    }
    if (y < 0 || y >= meta.num_classes) {
      throw Error(ErrorKind::OutOfRangeIndex, "labels.tsv:" + std::to_string(line) + ": label " +
                                                  std::to_string(y) + " outside [0, " +
                                                  std::to_string(meta.num_classes) + ")");
    }
    if (seen[node]) parse_fail(labels_path, line, "duplicate label for node " + std::to_string(node));
    seen[node] = true;
    labels[node] = y;
  });
  count_check("labels", label_rows, n);

  const nlohmann::json split_json = read_json(split_path);
  Splits splits;
  try {
    splits.train = split_json.at("train").get<std::vector<NodeId>>();
    splits.val = split_json.at("val").get<std::vector<NodeId>>();
    splits.test = split_json.at("test").get<std::vector<NodeId>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, "split.json: " + std::string(e.what()));
  }

  Graph g = build_graph(n, edges, std::move(features), std::move(labels), splits, meta.num_classes);
  if (meta_out) *meta_out = meta;
  return g;
}

void save_bundle(const Graph& g, const std::string& name, const fs::path& dir) {
  for (int y : g.labels) {
    if (y < 0) throw Error(ErrorKind::InvalidArgument, "save_bundle needs a label for every node");
  }
  fs::create_directories(dir);
  auto open = [&](const char* file) {
    std::ofstream out(dir / file);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + (dir / file).string());
    out.precision(17);
    return out;
  };
  {
    nlohmann::json meta = {{"name", name},
                           {"num_nodes", g.num_nodes},
                           {"num_features", g.num_features},
                           {"num_classes", g.num_classes},
                           {"directed", false}};
    open("meta.json") << meta.dump() << "\n";
  }
  {
    auto out = open("edges.tsv");
    for (auto [u, v] : g.edges) out << u << '\t' << v << '\n';
  }
  {
    auto out = open("features.tsv");
    for (int i = 0; i < g.num_nodes; ++i) {
      for (int j = 0; j < g.num_features; ++j) {
        if (g.features(i, j) != 0.0) out << i << '\t' << j << '\t' << g.features(i, j) << '\n';
      }
    }
  }
  {
    auto out = open("labels.tsv");
    for (int i = 0; i < g.num_nodes; ++i) out << i << '\t' << g.labels[i] << '\n';
  }
  {
    nlohmann::json split = {{"train", g.train_nodes()}, {"val", g.val_nodes()}, {"test", g.test_nodes()}};
    open("split.json") << split.dump() << "\n";
  }
}

}  // namespace viewx
