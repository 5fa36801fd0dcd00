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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdgcn/matrix.hpp"

namespace sdgcn {

using NodeId = std::int32_t;

struct Masks {
  std::vector<bool> train;
  std::vector<bool> val;
  std::vector<bool> test;
};

/// Immutable undirected graph in CSR form with per-node features, labels and
/// train/val/test masks.
///
/// Invariants (enforced by the constructor):
///  - adjacency is symmetric, with no self-loops and no duplicate edges;
///  - each CSR row is sorted ascending;
///  - features has n rows, labels and masks have n entries.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from an undirected edge list. Each pair may appear in
  /// either or both orientations and any number of times. Self-loops are
  /// dropped and counted in dropped_self_loops().
  Graph(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges, Matrix features,
        std::vector<int> labels, Masks masks, int num_classes);

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  // Number of stored directed edge slots (twice the undirected edge count).
  std::size_t num_edge_slots() const { return targets_.size(); }
  std::size_t num_undirected_edges() const { return targets_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId i) const {
    return {targets_.data() + offsets_[i], targets_.data() + offsets_[i + 1]};
  }
  std::size_t degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }
  bool has_edge(NodeId i, NodeId j) const;
  std::size_t max_degree() const;

  const std::vector<std::size_t>& csr_offsets() const { return offsets_; }
  const std::vector<NodeId>& csr_targets() const { return targets_; }
  const Matrix& features() const { return features_; }
  std::size_t feature_dim() const { return features_.cols(); }
  const std::vector<int>& labels() const { return labels_; }
  const Masks& masks() const { return masks_; }
  int num_classes() const { return num_classes_; }
  std::size_t dropped_self_loops() const { return dropped_self_loops_; }

  // Each undirected edge once, as (u, v) with u < v, in CSR order.
  std::vector<std::pair<NodeId, NodeId>> edge_list() const;

  // Subgraph induced by `nodes` (original ids); node k of the result is
  // nodes[k]. Features, labels and masks are carried over.
  Graph induced_subgraph(std::span<const NodeId> nodes) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  Matrix features_;
  std::vector<int> labels_;
  Masks masks_;
  int num_classes_ = 0;
  std::size_t dropped_self_loops_ = 0;
};

/// Nodes grouped by BFS distance from a source.
struct DistancePartition {
  NodeId source = 0;
  int max_length = 0;
  // levels[l] holds the nodes at distance exactly l; levels[0] = {source}.
  // Sized to the deepest non-empty level that is <= max_length.
  std::vector<std::vector<NodeId>> levels;

  std::span<const NodeId> nodes_at(int l) const {
    if (l < 0 || static_cast<std::size_t>(l) >= levels.size()) return {};
    return levels[l];
  }
};

struct SbmParams {
  int blocks = 2;
  int nodes_per_block = 10;
  double p_in = 0.5;
  double p_out = 0.05;
  int feature_dim = 16;
  double feature_noise = 0.5;
  std::uint64_t seed = 0;
};

Graph load_graph(const std::filesystem::path& path);
Graph parse_graph_json(const std::string& text);
void save_graph(const Graph& g, const std::filesystem::path& path);
std::string graph_to_json(const Graph& g);

/// Largest connected component among nodes of degree >= 1, remapped to
/// [0, n'). Equal-size components are broken by smallest original node id.
/// A graph with no edges yields its lowest-id node alone.
Graph largest_connected_component(const Graph& g);

// Component id per node (ids in order of first appearance by node id).
std::vector<int> connected_components(const Graph& g, int* count = nullptr);

DistancePartition bfs_distance_partition(const Graph& g, NodeId source, int max_length);

// Unbounded BFS distances; unreachable nodes get -1.
std::vector<int> bfs_distances(const Graph& g, NodeId source);

/// Planted-partition graph: labels are block ids, features are the one-hot
/// block prototype (index block mod d) plus N(0, noise^2) per entry, masks are
/// a per-block 60/20/20 split.
Graph generate_sbm(const SbmParams& params);

}  // namespace sdgcn
