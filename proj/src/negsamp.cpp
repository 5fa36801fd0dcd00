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

#include "sdgcn/negsamp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "sdgcn/error.hpp"

namespace sdgcn {

bool NegativeSampleTable::empty() const {
  return std::all_of(negatives.begin(), negatives.end(), [](const auto& v) { return v.empty(); });
}

std::size_t NegativeSampleTable::total_negatives() const {
  std::size_t s = 0;
  for (const auto& v : negatives) s += v.size();
  return s;
}

CandidateSet build_candidates_shortest_path(const Graph& g, const Matrix& x, NodeId i, int max_length, Rng& rng) {
  CandidateSet cs;
  cs.anchor = i;
  cs.partition = bfs_distance_partition(g, i, max_length);

  std::vector<NodeId> pool;
  for (int l = 2; l <= max_length; ++l) {
    auto level = cs.partition.nodes_at(l);
    if (level.empty()) break;
    const NodeId j = level[rng.uniform_index(level.size())];
    cs.chosen.push_back(j);
    pool.push_back(j);
    for (NodeId v : g.neighbors(j)) pool.push_back(v);
  }
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  // Neighbours of a distance-2 endpoint can be the anchor or its neighbours.
  auto excluded = [&](NodeId v) { return v == i || g.has_edge(i, v); };
  for (NodeId v : pool)
    if (!excluded(v)) cs.members.push_back(v);

  if (!cs.members.empty()) {
    cs.mean_feature.assign(x.cols(), 0.0);
    for (NodeId v : cs.members) {
      auto r = x.row(v);
      for (std::size_t t = 0; t < r.size(); ++t) cs.mean_feature[t] += r[t];
    }
    for (double& v : cs.mean_feature) v /= static_cast<double>(cs.members.size());
  }
  return cs;
}

AnchorSelection parse_anchor_selection(std::string_view text) {
  auto fraction_of = [&](std::string_view rest) {
    double f = 0.0;
    const auto res = std::from_chars(rest.data(), rest.data() + rest.size(), f);
    if (res.ec != std::errc() || res.ptr != rest.data() + rest.size())
      throw UsageError("anchors: cannot parse fraction in '" + std::string(text) + "'");
    return f;
  };
  AnchorSelection s;
  if (text == "all") {
    s.strategy = AnchorStrategy::kAll;
  } else if (text == "deg1") {
    s.strategy = AnchorStrategy::kDegreeGreaterThanOne;
  } else if (text.starts_with("topk:")) {
    s.strategy = AnchorStrategy::kTopDegreeFraction;
    s.fraction = fraction_of(text.substr(5));
  } else if (text.starts_with("rand:")) {
    s.strategy = AnchorStrategy::kRandomFraction;
    s.fraction = fraction_of(text.substr(5));
  } else {
    throw UsageError("anchors: expected all|deg1|topk:F|rand:F, got '" + std::string(text) + "'");
  }
  if (!(s.fraction > 0.0 && s.fraction <= 1.0)) throw UsageError("anchors: fraction must lie in (0, 1]");
  return s;
}

std::string to_string(const AnchorSelection& s) {
  switch (s.strategy) {
    case AnchorStrategy::kAll:
      return "all";
    case AnchorStrategy::kDegreeGreaterThanOne:
      return "deg1";
    case AnchorStrategy::kTopDegreeFraction:
      return "topk:" + std::to_string(s.fraction);
    case AnchorStrategy::kRandomFraction:
      return "rand:" + std::to_string(s.fraction);
  }
  return "?";
}

std::vector<NodeId> select_anchor_nodes(const Graph& g, const AnchorSelection& sel, Rng& rng) {
  if (!(sel.fraction > 0.0 && sel.fraction <= 1.0)) throw UsageError("select_anchor_nodes: fraction must lie in (0, 1]");
  const std::size_t n = g.num_nodes();
  std::vector<NodeId> all(n);
  std::iota(all.begin(), all.end(), 0);
  const auto take = static_cast<std::size_t>(std::ceil(sel.fraction * static_cast<double>(n) - 1e-9));

  switch (sel.strategy) {
    case AnchorStrategy::kAll:
      return all;
    case AnchorStrategy::kDegreeGreaterThanOne: {
      std::vector<NodeId> out;
      for (NodeId v : all)
        if (g.degree(v) > 1) out.push_back(v);
      return out;
    }
    case AnchorStrategy::kTopDegreeFraction: {
      std::stable_sort(all.begin(), all.end(), [&](NodeId a, NodeId b) { return g.degree(a) > g.degree(b); });
      all.resize(std::min(take, n));
      return all;
    }
    case AnchorStrategy::kRandomFraction: {
      rng.shuffle(std::span<NodeId>(all));
      all.resize(std::min(take, n));
      std::sort(all.begin(), all.end());
      return all;
    }
  }
  return all;
}

std::vector<NodeId> uniform_non_neighbors(const Graph& g, NodeId i, std::size_t count, Rng& rng) {
  std::vector<NodeId> eligible;
  auto nb = g.neighbors(i);
  for (std::size_t v = 0, p = 0; v < g.num_nodes(); ++v) {
    while (p < nb.size() && static_cast<std::size_t>(nb[p]) < v) ++p;
    const bool is_nb = p < nb.size() && static_cast<std::size_t>(nb[p]) == v;
    if (static_cast<NodeId>(v) != i && !is_nb) eligible.push_back(static_cast<NodeId>(v));
  }
  if (eligible.size() <= count) return eligible;
  // Partial Fisher-Yates: the first `count` slots become a uniform subset.
  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t j = t + static_cast<std::size_t>(rng.uniform_index(eligible.size() - t));
    std::swap(eligible[t], eligible[j]);
  }
  eligible.resize(count);
  std::sort(eligible.begin(), eligible.end());
  return eligible;
}

namespace {

NegativeSampleTable empty_table(std::size_t n) {
  NegativeSampleTable t;
  t.negatives.resize(n);
  t.is_anchor.assign(n, 0);
  t.fallback.assign(n, 0);
  return t;
}

void check_context(const SamplingContext& ctx) {
  if (!ctx.graph || !ctx.embeddings || !ctx.communities) throw UsageError("sampling context is incomplete");
  if (ctx.embeddings->rows() != ctx.graph->num_nodes()) throw UsageError("embeddings must have one row per node");
  if (ctx.communities->membership.size() != ctx.graph->num_nodes())
    throw UsageError("community membership must cover every node");
}

// Runs the k-DPP over `candidates` for anchor i and stores the result.
void sample_for_anchor(const SamplingContext& ctx, const Matrix& comm_features, NodeId i,
                       const std::vector<NodeId>& candidates, Rng& rng, NegativeSampleTable& table) {
  const Graph& g = *ctx.graph;
  table.is_anchor[i] = 1;
  const std::size_t target = negative_target(g, i);
  if (candidates.empty()) {
    Rng fb = rng.split(3);
    table.fallback[i] = 1;
    table.negatives[i] = uniform_non_neighbors(g, i, target, fb);
    return;
  }
  const int k = static_cast<int>(std::min(target, candidates.size()));
  const KernelContext kc =
      make_kernel_context(*ctx.embeddings, i, candidates, ctx.communities->membership, comm_features);
  const BuiltKernel kernel = build_kernel(kc, ctx.kernel);
  Rng draw = rng.split(2);
  std::vector<NodeId> out;
  for (std::size_t idx : sample_kdpp(kernel.eigen, k, draw)) out.push_back(candidates[idx]);
  std::sort(out.begin(), out.end());
  table.negatives[i] = std::move(out);
}

}  // namespace

NegativeSampleTable diverse_negatives_full(const SamplingContext& ctx, std::span<const NodeId> anchors) {
  check_context(ctx);
  const Graph& g = *ctx.graph;
  if (g.num_nodes() > kFullDppMaxNodes)
    throw UsageError("full-graph DPP sampling is limited to " + std::to_string(kFullDppMaxNodes) +
                     " nodes (cubic cost per anchor); use the shortest-path sampler instead");
  const Matrix comm = community_features(*ctx.embeddings, ctx.communities->membership,
                                         ctx.communities->num_communities);
  NegativeSampleTable table = empty_table(g.num_nodes());
  for (NodeId i : anchors) {
    std::vector<NodeId> candidates;
    for (std::size_t v = 0; v < g.num_nodes(); ++v)
      if (static_cast<NodeId>(v) != i && !g.has_edge(i, static_cast<NodeId>(v)))
        candidates.push_back(static_cast<NodeId>(v));
    Rng rng = Rng::stream(ctx.seed, ctx.epoch, ctx.layer, static_cast<std::uint64_t>(i));
    sample_for_anchor(ctx, comm, i, candidates, rng, table);
  }
  return table;
}

NegativeSampleTable diverse_negatives_sp(const SamplingContext& ctx, std::span<const NodeId> anchors,
                                         int max_length) {
  check_context(ctx);
  if (max_length < 2) throw UsageError("path length must be >= 2");
  const Graph& g = *ctx.graph;
  const Matrix comm = community_features(*ctx.embeddings, ctx.communities->membership,
                                         ctx.communities->num_communities);
  NegativeSampleTable table = empty_table(g.num_nodes());
  for (NodeId i : anchors) {
    Rng rng = Rng::stream(ctx.seed, ctx.epoch, ctx.layer, static_cast<std::uint64_t>(i));
    Rng pick = rng.split(1);
    const CandidateSet cs = build_candidates_shortest_path(g, *ctx.embeddings, i, max_length, pick);
    sample_for_anchor(ctx, comm, i, cs.members, rng, table);
  }
  return table;
}

NegativeSampleTable random_negatives(const Graph& g, std::span<const NodeId> anchors, std::uint64_t seed,
                                     std::uint64_t epoch, std::uint64_t layer) {
  NegativeSampleTable table = empty_table(g.num_nodes());
  for (NodeId i : anchors) {
    Rng rng = Rng::stream(seed, epoch, layer, static_cast<std::uint64_t>(i));
    table.is_anchor[i] = 1;
    table.negatives[i] = uniform_non_neighbors(g, i, negative_target(g, i), rng);
  }
  return table;
}

CandidateCostReport candidate_cost_report(double avg_path_nodes, double avg_degree, double num_nodes) {
  CandidateCostReport r;
  r.avg_path_nodes = avg_path_nodes;
  r.avg_degree = avg_degree;
  r.num_nodes = num_nodes;
  r.candidate_cost = std::pow(avg_path_nodes * avg_degree, 3.0);
  r.full_cost = std::pow(num_nodes, 3.0);
  return r;
}

}  // namespace sdgcn
