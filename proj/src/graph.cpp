// Copyright 2026 The sdgcn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sdgcn/graph.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "sdgcn/error.hpp"
#include "sdgcn/rng.hpp"

namespace sdgcn {

using json = nlohmann::json;

Graph::Graph(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges, Matrix features,
             std::vector<int> labels, Masks masks, int num_classes)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      masks_(std::move(masks)),
      num_classes_(num_classes) {
  if (features_.rows() != n) throw DataError("features: expected " + std::to_string(n) + " rows");
  if (labels_.size() != n) throw DataError("labels: expected " + std::to_string(n) + " entries");
  if (masks_.train.size() != n || masks_.val.size() != n || masks_.test.size() != n)
    throw DataError("masks: train/val/test must each have " + std::to_string(n) + " entries");
  for (int y : labels_)
    if (y < 0 || y >= num_classes_) throw DataError("labels: class id out of [0, num_classes)");

  std::vector<std::pair<NodeId, NodeId>> slots;
  slots.reserve(edges.size() * 2);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n)
      throw DataError("edges: endpoint out of range [0, " + std::to_string(n) + ")");
    if (u == v) {
      ++dropped_self_loops_;
      continue;
    }
    slots.emplace_back(u, v);
    slots.emplace_back(v, u);
  }
  std::sort(slots.begin(), slots.end());
  slots.erase(std::unique(slots.begin(), slots.end()), slots.end());

  offsets_.assign(n + 1, 0);
  targets_.reserve(slots.size());
  for (auto [u, v] : slots) {
    ++offsets_[u + 1];
    targets_.push_back(v);
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
}

bool Graph::has_edge(NodeId i, NodeId j) const {
  auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

std::size_t Graph::max_degree() const {
  std::size_t best = 0;
  for (std::size_t i = 0; i < num_nodes(); ++i) best = std::max(best, degree(static_cast<NodeId>(i)));
  return best;
}

std::vector<std::pair<NodeId, NodeId>> Graph::edge_list() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(num_undirected_edges());
  for (std::size_t u = 0; u < num_nodes(); ++u)
    for (NodeId v : neighbors(static_cast<NodeId>(u)))
      if (static_cast<NodeId>(u) < v) out.emplace_back(static_cast<NodeId>(u), v);
  return out;
}

Graph Graph::induced_subgraph(std::span<const NodeId> nodes) const {
  const std::size_t n = num_nodes();
  std::vector<NodeId> remap(n, -1);
  for (std::size_t k = 0; k < nodes.size(); ++k) remap[nodes[k]] = static_cast<NodeId>(k);

  std::vector<std::pair<NodeId, NodeId>> edges;
  Matrix feats(nodes.size(), feature_dim());
  std::vector<int> labels(nodes.size());
  Masks masks{std::vector<bool>(nodes.size()), std::vector<bool>(nodes.size()),
              std::vector<bool>(nodes.size())};
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const NodeId old = nodes[k];
    std::copy(features_.row(old).begin(), features_.row(old).end(), feats.row(k).begin());
    labels[k] = labels_[old];
    masks.train[k] = masks_.train[old];
    masks.val[k] = masks_.val[old];
    masks.test[k] = masks_.test[old];
    for (NodeId v : neighbors(old))
      if (remap[v] >= 0 && static_cast<NodeId>(k) < remap[v]) edges.emplace_back(static_cast<NodeId>(k), remap[v]);
  }
  return Graph(nodes.size(), edges, std::move(feats), std::move(labels), std::move(masks), num_classes_);
}

namespace {

template <typename T>
T get_field(const json& obj, const char* key) {
  if (!obj.contains(key)) throw DataError(std::string("graph file: missing field '") + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(std::string("graph file: field '") + key + "': " + e.what());
  }
}

std::vector<bool> get_mask(const json& masks, const char* key, std::size_t n) {
  if (!masks.contains(key)) throw DataError(std::string("graph file: missing field 'masks.") + key + "'");
  std::vector<bool> out;
  try {
    out = masks.at(key).get<std::vector<bool>>();
  } catch (const json::exception& e) {
    throw DataError(std::string("graph file: field 'masks.") + key + "': " + e.what());
  }
  if (out.size() != n)
    throw DataError(std::string("graph file: validation error: 'masks.") + key + "' has " +
                    std::to_string(out.size()) + " entries, expected " + std::to_string(n));
  return out;
}

}  // namespace

Graph parse_graph_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports "line L, column C" in its message.
    throw DataError(std::string("graph file: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("graph file: top level must be an object");

  const auto n_signed = get_field<long long>(doc, "n");
  if (n_signed < 0) throw DataError("graph file: field 'n' must be non-negative");
  const auto n = static_cast<std::size_t>(n_signed);

  const auto raw_edges = get_field<std::vector<std::array<long long, 2>>>(doc, "edges");
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(raw_edges.size());
  for (std::size_t e = 0; e < raw_edges.size(); ++e) {
    auto [u, v] = raw_edges[e];
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n)
      throw DataError("graph file: field 'edges[" + std::to_string(e) + "]' endpoint out of range");
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }

  const auto rows = get_field<std::vector<std::vector<double>>>(doc, "features");
  if (rows.size() != n)
    throw DataError("graph file: validation error: 'features' has " + std::to_string(rows.size()) +
                    " rows, expected " + std::to_string(n));
  const std::size_t d = rows.empty() ? 0 : rows.front().size();
  Matrix features(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != d)
      throw DataError("graph file: field 'features[" + std::to_string(i) + "]' has inconsistent width");
    std::copy(rows[i].begin(), rows[i].end(), features.row(i).begin());
  }

  auto labels = get_field<std::vector<int>>(doc, "labels");
  if (labels.size() != n)
    throw DataError("graph file: validation error: 'labels' has " + std::to_string(labels.size()) +
                    " entries, expected " + std::to_string(n));
  const int num_classes = get_field<int>(doc, "num_classes");

  if (!doc.contains("masks") || !doc["masks"].is_object())
    throw DataError("graph file: missing field 'masks'");
  const json& m = doc["masks"];
  Masks masks{get_mask(m, "train", n), get_mask(m, "val", n), get_mask(m, "test", n)};

  Graph g(n, edges, std::move(features), std::move(labels), std::move(masks), num_classes);
  if (g.dropped_self_loops() > 0)
    std::cerr << "warning: dropped " << g.dropped_self_loops() << " self-loop(s)\n";
  return g;
}

Graph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open graph file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_graph_json(ss.str());
}

std::string graph_to_json(const Graph& g) {
  const std::size_t n = g.num_nodes();
  json doc;
  doc["n"] = n;
  json edges = json::array();
  for (auto [u, v] : g.edge_list()) edges.push_back({u, v});
  doc["edges"] = std::move(edges);
  json feats = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    auto r = g.features().row(i);
    feats.push_back(std::vector<double>(r.begin(), r.end()));
  }
  doc["features"] = std::move(feats);
  doc["labels"] = g.labels();
  doc["masks"] = {{"train", g.masks().train}, {"val", g.masks().val}, {"test", g.masks().test}};
  doc["num_classes"] = g.num_classes();
  return doc.dump();
}

void save_graph(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write graph file: " + path.string());
  out << graph_to_json(g) << '\n';
}

std::vector<int> connected_components(const Graph& g, int* count) {
  const std::size_t n = g.num_nodes();
  std::vector<int> comp(n, -1);
  std::vector<NodeId> queue;
  int next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = next;
    queue.assign(1, static_cast<NodeId>(s));
    for (std::size_t head = 0; head < queue.size(); ++head)
      for (NodeId v : g.neighbors(queue[head]))
        if (comp[v] < 0) {
          comp[v] = next;
          queue.push_back(v);
        }
    ++next;
  }
  if (count) *count = next;
  return comp;
}

Graph largest_connected_component(const Graph& g) {
  const std::size_t n = g.num_nodes();
  if (n == 0) throw DataError("largest_connected_component: empty graph");
  int count = 0;
  const auto comp = connected_components(g, &count);

  // Components are numbered by their smallest node id, so a strict '>'
  // scan keeps the lowest-id component among equal sizes.
  std::vector<std::size_t> size(count, 0);
  for (std::size_t i = 0; i < n; ++i)
    if (g.degree(static_cast<NodeId>(i)) > 0) ++size[comp[i]];
  int best = -1;
  for (int c = 0; c < count; ++c)
    if (size[c] > 0 && (best < 0 || size[c] > size[best])) best = c;

  std::vector<NodeId> keep;
  if (best < 0) {
    keep.push_back(0);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      if (comp[i] == best) keep.push_back(static_cast<NodeId>(i));
  }
  return g.induced_subgraph(keep);
}

std::vector<int> bfs_distances(const Graph& g, NodeId source) {
  std::vector<int> dist(g.num_nodes(), -1);
  std::vector<NodeId> queue{source};
  dist[source] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId u = queue[head];
    for (NodeId v : g.neighbors(u))
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
  }
  return dist;
}

DistancePartition bfs_distance_partition(const Graph& g, NodeId source, int max_length) {
  if (source < 0 || static_cast<std::size_t>(source) >= g.num_nodes())
    throw UsageError("bfs_distance_partition: source out of range");
  if (max_length < 2) throw UsageError("bfs_distance_partition: max_length must be >= 2");

  DistancePartition part;
  part.source = source;
  part.max_length = max_length;
  part.levels.push_back({source});

  std::vector<char> seen(g.num_nodes(), 0);
  seen[source] = 1;
  while (static_cast<int>(part.levels.size()) <= max_length) {
    std::vector<NodeId> next;
    for (NodeId u : part.levels.back())
      for (NodeId v : g.neighbors(u))
        if (!seen[v]) {
          seen[v] = 1;
          next.push_back(v);
        }
    if (next.empty()) break;
    std::sort(next.begin(), next.end());
    part.levels.push_back(std::move(next));
  }
  return part;
}

Graph generate_sbm(const SbmParams& p) {
  if (p.blocks <= 0 || p.nodes_per_block <= 0) throw UsageError("generate_sbm: blocks * nodes_per_block must be > 0");
  if (!(0.0 <= p.p_out && p.p_out <= p.p_in && p.p_in <= 1.0))
    throw UsageError("generate_sbm: require 0 <= p_out <= p_in <= 1");
  if (p.feature_dim <= 0) throw UsageError("generate_sbm: feature_dim must be > 0");
  if (p.feature_noise < 0.0) throw UsageError("generate_sbm: feature_noise must be >= 0");

  const std::size_t n = static_cast<std::size_t>(p.blocks) * p.nodes_per_block;
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i / p.nodes_per_block);

  Rng edge_rng = Rng::stream(p.seed, 1);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) {
      const double prob = labels[u] == labels[v] ? p.p_in : p.p_out;
      if (edge_rng.uniform() < prob) edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }

  Rng feat_rng = Rng::stream(p.seed, 2);
  Matrix features(n, p.feature_dim);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = features.row(i);
    r[labels[i] % p.feature_dim] = 1.0;
    if (p.feature_noise > 0.0)
      for (double& x : r) x += p.feature_noise * feat_rng.normal();
  }

  Masks masks{std::vector<bool>(n), std::vector<bool>(n), std::vector<bool>(n)};
  Rng split_rng = Rng::stream(p.seed, 3);
  const std::size_t m = p.nodes_per_block;
  const std::size_t n_train = m * 6 / 10;
  const std::size_t n_val = m * 2 / 10;
  for (int b = 0; b < p.blocks; ++b) {
    std::vector<NodeId> members(m);
    std::iota(members.begin(), members.end(), static_cast<NodeId>(b * m));
    split_rng.shuffle(std::span<NodeId>(members));
    for (std::size_t k = 0; k < m; ++k) {
      if (k < n_train)
        masks.train[members[k]] = true;
      else if (k < n_train + n_val)
        masks.val[members[k]] = true;
      else
        masks.test[members[k]] = true;
    }
  }
  return Graph(n, edges, std::move(features), std::move(labels), std::move(masks), p.blocks);
}

}  // namespace sdgcn
