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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sdgcn/community.hpp"
#include "sdgcn/dpp.hpp"
#include "sdgcn/graph.hpp"
#include "sdgcn/rng.hpp"

namespace sdgcn {

inline constexpr int kDefaultPathLength = 6;
// Full-graph DPP sampling eigendecomposes an (n-1)-order kernel per anchor.
inline constexpr std::size_t kFullDppMaxNodes = 500;

struct CandidateSet {
  NodeId anchor = 0;
  std::vector<NodeId> members;  // ascending
  std::vector<double> mean_feature;
  DistancePartition partition;
  std::vector<NodeId> chosen;  // one endpoint per distance level, ascending by level
};

/// Negative samples per node. Nodes that are not anchors have empty lists.
struct NegativeSampleTable {
  std::vector<std::vector<NodeId>> negatives;
  std::vector<char> is_anchor;
  // Anchor whose DPP candidate set was empty; uniform sampling was used.
  std::vector<char> fallback;

  std::size_t num_nodes() const { return negatives.size(); }
  bool empty() const;
  std::size_t total_negatives() const;
};

// Target negative count for node i: degree(i) + 1.
inline std::size_t negative_target(const Graph& g, NodeId i) { return g.degree(i) + 1; }

/// Shortest-path candidates for anchor i: for every distance l in [2, L]
/// with a non-empty level, one uniformly drawn node j_l plus its neighbours;
/// the anchor and its neighbours are then removed. mean_feature is the mean
/// of x over the members (empty when there are none).
CandidateSet build_candidates_shortest_path(const Graph& g, const Matrix& x, NodeId i, int max_length, Rng& rng);

enum class AnchorStrategy { kAll, kDegreeGreaterThanOne, kTopDegreeFraction, kRandomFraction };

struct AnchorSelection {
  AnchorStrategy strategy = AnchorStrategy::kAll;
  double fraction = 1.0;
};

// Parses all | deg1 | topk:F | rand:F.
AnchorSelection parse_anchor_selection(std::string_view text);
std::string to_string(const AnchorSelection& s);

/// Degree strategies are deterministic (top-degree ranks by degree
/// descending, then id); random-fraction draws ceil(F*n) nodes with `rng`.
/// Throws UsageError if fraction is outside (0, 1].
std::vector<NodeId> select_anchor_nodes(const Graph& g, const AnchorSelection& sel, Rng& rng);

/// Per-anchor inputs shared by the DPP samplers. Anchor streams are
/// Rng::stream(seed, epoch, layer, anchor).
struct SamplingContext {
  const Graph* graph = nullptr;
  const Matrix* embeddings = nullptr;  // rows = nodes, used for kernels
  const CommunityAssignment* communities = nullptr;
  KernelSpec kernel;
  std::uint64_t seed = 0;
  std::uint64_t epoch = 0;
  std::uint64_t layer = 0;
};

/// Candidates are every node except the anchor and its neighbours. Throws
/// UsageError when the graph exceeds kFullDppMaxNodes.
NegativeSampleTable diverse_negatives_full(const SamplingContext& ctx, std::span<const NodeId> anchors);

/// Shortest-path candidates followed by a k-DPP draw of
/// min(degree + 1, |S_i|) items; empty S_i falls back to uniform sampling.
NegativeSampleTable diverse_negatives_sp(const SamplingContext& ctx, std::span<const NodeId> anchors,
                                         int max_length = kDefaultPathLength);

/// degree(i) + 1 non-neighbours drawn uniformly without replacement (all of
/// them if fewer are available).
NegativeSampleTable random_negatives(const Graph& g, std::span<const NodeId> anchors, std::uint64_t seed,
                                     std::uint64_t epoch = 0, std::uint64_t layer = 0);

// Uniform draw of up to `count` nodes that are neither i nor its neighbours.
std::vector<NodeId> uniform_non_neighbors(const Graph& g, NodeId i, std::size_t count, Rng& rng);

/// Cost of one shortest-path DPP draw vs one full-graph draw, in the cubic
/// eigendecomposition model.
struct CandidateCostReport {
  double avg_path_nodes = 0.0;
  double avg_degree = 0.0;
  double num_nodes = 0.0;
  double candidate_cost = 0.0;  // (avg_path_nodes * avg_degree)^3
  double full_cost = 0.0;       // num_nodes^3
};

CandidateCostReport candidate_cost_report(double avg_path_nodes, double avg_degree, double num_nodes);

}  // namespace sdgcn
