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
#include <vector>

#include "sdgcn/graph.hpp"
#include "sdgcn/matrix.hpp"

namespace sdgcn {

struct CommunityAssignment {
  std::vector<int> membership;  // node -> community id in [0, K)
  int num_communities = 0;
  Matrix community_features;  // K x d, row k = mean feature of community k
  std::vector<std::size_t> community_sizes;
  bool converged = true;
  int sweeps = 0;
};

inline constexpr int kMaxLabelPropagationSweeps = 100;

/// Semi-synchronous label propagation on graph topology.
///
/// Nodes are greedily coloured (in id order); within a sweep each colour
/// class updates simultaneously to the most frequent neighbour label. A node
/// whose current label is already among the most frequent keeps it; other
/// ties are resolved by a seeded shuffle of the tied labels. Stops when a
/// sweep changes nothing or after kMaxLabelPropagationSweeps, in which case
/// `converged` is false. Community ids are compacted in order of first
/// appearance by node id. community_features are computed from g.features().
CommunityAssignment label_propagation(const Graph& g, std::uint64_t seed);

// Greedy colouring in node-id order; returns colour per node.
std::vector<int> greedy_coloring(const Graph& g, int* num_colors = nullptr);

/// Row k is the mean of x's rows over community k.
/// Throws DataError if a community id in [0, K) has no members.
Matrix community_features(const Matrix& x, std::span<const int> membership, int num_communities);

}  // namespace sdgcn
