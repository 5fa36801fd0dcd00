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

#include "sdgcn/community.hpp"

#include <algorithm>
#include <numeric>

#include "sdgcn/error.hpp"
#include "sdgcn/rng.hpp"

namespace sdgcn {

std::vector<int> greedy_coloring(const Graph& g, int* num_colors) {
  const std::size_t n = g.num_nodes();
  std::vector<int> color(n, -1);
  std::vector<char> used;
  int k = 0;
  for (std::size_t u = 0; u < n; ++u) {
    used.assign(g.degree(static_cast<NodeId>(u)) + 1, 0);
    for (NodeId v : g.neighbors(static_cast<NodeId>(u)))
      if (color[v] >= 0 && static_cast<std::size_t>(color[v]) < used.size()) used[color[v]] = 1;
    int c = 0;
    while (used[c]) ++c;
    color[u] = c;
    k = std::max(k, c + 1);
  }
  if (num_colors) *num_colors = k;
  return color;
}

namespace {

// Labels tied for the highest count among u's neighbours, ascending.
void majority_labels(const Graph& g, NodeId u, const std::vector<int>& labels, std::vector<int>& scratch,
                     std::vector<int>& best) {
  scratch.clear();
  for (NodeId v : g.neighbors(u)) scratch.push_back(labels[v]);
  std::sort(scratch.begin(), scratch.end());
  best.clear();
  std::size_t best_count = 0;
  for (std::size_t i = 0; i < scratch.size();) {
    std::size_t j = i;
    while (j < scratch.size() && scratch[j] == scratch[i]) ++j;
    const std::size_t c = j - i;
    if (c > best_count) {
      best_count = c;
      best.assign(1, scratch[i]);
    } else if (c == best_count) {
      best.push_back(scratch[i]);
    }
    i = j;
  }
}

}  // namespace

CommunityAssignment label_propagation(const Graph& g, std::uint64_t seed) {
  const std::size_t n = g.num_nodes();
  if (n == 0) throw UsageError("label_propagation: graph has no nodes");

  int num_colors = 0;
  const auto color = greedy_coloring(g, &num_colors);
  std::vector<std::vector<NodeId>> classes(num_colors);
  for (std::size_t u = 0; u < n; ++u) classes[color[u]].push_back(static_cast<NodeId>(u));

  std::vector<int> labels(n);
  std::iota(labels.begin(), labels.end(), 0);

  CommunityAssignment out;
  out.converged = false;
  std::vector<int> scratch, best;
  std::vector<std::pair<NodeId, int>> updates;
  for (int sweep = 0; sweep < kMaxLabelPropagationSweeps; ++sweep) {
    bool changed = false;
    for (const auto& cls : classes) {
      // A colour class is an independent set, so computing all of its
      // updates before applying any is a simultaneous update.
      updates.clear();
      for (NodeId u : cls) {
        if (g.degree(u) == 0) continue;
        majority_labels(g, u, labels, scratch, best);
        if (std::binary_search(best.begin(), best.end(), labels[u])) continue;
        int pick = best.front();
        if (best.size() > 1) {
          Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(sweep), static_cast<std::uint64_t>(u));
          rng.shuffle(std::span<int>(best));
          pick = best.front();
        }
        updates.emplace_back(u, pick);
      }
      for (auto [u, l] : updates) labels[u] = l;
      changed = changed || !updates.empty();
    }
    out.sweeps = sweep + 1;
    if (!changed) {
      out.converged = true;
      break;
    }
  }

  std::vector<int> compact(n, -1);
  out.membership.resize(n);
  int k = 0;
  for (std::size_t u = 0; u < n; ++u) {
    int& id = compact[labels[u]];
    if (id < 0) id = k++;
    out.membership[u] = id;
  }
  out.num_communities = k;
  out.community_sizes.assign(k, 0);
  for (int c : out.membership) ++out.community_sizes[c];
  out.community_features = community_features(g.features(), out.membership, k);
  return out;
}

Matrix community_features(const Matrix& x, std::span<const int> membership, int num_communities) {
  if (membership.size() != x.rows()) throw UsageError("community_features: membership size != rows");
  Matrix a(num_communities, x.cols());
  std::vector<std::size_t> count(num_communities, 0);
  for (std::size_t i = 0; i < membership.size(); ++i) {
    const int c = membership[i];
    if (c < 0 || c >= num_communities) throw UsageError("community_features: community id out of range");
    ++count[c];
    auto dst = a.row(c);
    auto src = x.row(i);
    for (std::size_t t = 0; t < dst.size(); ++t) dst[t] += src[t];
  }
  for (int c = 0; c < num_communities; ++c) {
    if (count[c] == 0) throw DataError("community_features: community " + std::to_string(c) + " is empty");
    const double size = static_cast<double>(count[c]);
    for (double& v : a.row(c)) v /= size;
  }
  return a;
}

}  // namespace sdgcn
