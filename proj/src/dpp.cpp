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

#include "sdgcn/dpp.hpp"

#include <algorithm>
#include <cmath>

#include "sdgcn/error.hpp"

namespace sdgcn {

KernelVariant parse_kernel_variant(std::string_view name) {
  if (name == "qd") return KernelVariant::kQualityDiversity;
  if (name == "cosine") return KernelVariant::kCosine;
  if (name == "community") return KernelVariant::kCommunity;
  if (name == "node") return KernelVariant::kNode;
  throw UsageError("unknown kernel variant '" + std::string(name) + "' (expected qd|cosine|community|node)");
}

std::string_view to_string(KernelVariant v) {
  switch (v) {
    case KernelVariant::kCosine:
      return "cosine";
    case KernelVariant::kQualityDiversity:
      return "qd";
    case KernelVariant::kCommunity:
      return "community";
    case KernelVariant::kNode:
      return "node";
  }
  return "?";
}

KernelContext make_kernel_context(const Matrix& x, NodeId anchor, std::span<const NodeId> candidates,
                                  std::span<const int> membership, const Matrix& community_features) {
  if (candidates.empty()) throw UsageError("kernel context: empty candidate set");
  std::vector<NodeId> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw UsageError("kernel context: duplicate candidates");
  if (std::binary_search(sorted.begin(), sorted.end(), anchor))
    throw UsageError("kernel context: anchor is among its own candidates");

  const int num_comm = static_cast<int>(community_features.rows());
  auto community_of = [&](NodeId v) {
    if (static_cast<std::size_t>(v) >= membership.size() || membership[v] < 0 || membership[v] >= num_comm)
      throw DataError("kernel context: node " + std::to_string(v) + " has no community");
    return membership[v];
  };

  KernelContext ctx;
  ctx.anchor = anchor;
  ctx.candidates.assign(candidates.begin(), candidates.end());
  const std::size_t m = candidates.size();
  const std::size_t d = x.cols();
  ctx.candidate_features = Matrix(m, d);
  ctx.candidate_community_features = Matrix(m, d);
  ctx.candidate_mean.assign(d, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    auto xs = x.row(candidates[j]);
    std::copy(xs.begin(), xs.end(), ctx.candidate_features.row(j).begin());
    auto as = community_features.row(community_of(candidates[j]));
    std::copy(as.begin(), as.end(), ctx.candidate_community_features.row(j).begin());
    for (std::size_t t = 0; t < d; ++t) ctx.candidate_mean[t] += xs[t];
  }
  for (double& v : ctx.candidate_mean) v /= static_cast<double>(m);
  auto ai = community_features.row(community_of(anchor));
  ctx.anchor_community_feature.assign(ai.begin(), ai.end());
  return ctx;
}

namespace {

std::size_t order_of(const KernelContext& ctx) { return ctx.candidates.size(); }

// L[j][j'] = q_j * phi(j, j') * q_j', filled on the upper triangle and
// mirrored so the result is exactly symmetric.
template <typename Quality, typename Diversity>
SymmetricMatrix assemble(std::size_t m, Quality&& quality, Diversity&& diversity) {
  std::vector<double> q(m);
  for (std::size_t j = 0; j < m; ++j) q[j] = quality(j);
  SymmetricMatrix l(m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t jp = j; jp < m; ++jp) l.set(j, jp, q[j] * diversity(j, jp) * q[jp]);
  return l;
}

}  // namespace

SymmetricMatrix build_cosine_kernel(const KernelContext& ctx, bool* degenerate) {
  const auto& x = ctx.candidate_features;
  return assemble(
      order_of(ctx), [](std::size_t) { return 1.0; },
      [&](std::size_t j, std::size_t jp) {
        if (j == jp) {
          // cos(x, x) = 1 except for a zero row, which counts as cos = 0.
          bool deg = false;
          const double c = cosine(x.row(j), x.row(j), &deg);
          if (deg && degenerate) *degenerate = true;
          return std::exp(c - 1.0);
        }
        return std::exp(cosine(x.row(j), x.row(jp), degenerate) - 1.0);
      });
}

SymmetricMatrix build_qd_kernel_raw(const KernelContext& ctx, bool* degenerate) {
  const auto& x = ctx.candidate_features;
  const auto& a = ctx.candidate_community_features;
  const double set_quality = cosine(ctx.anchor_community_feature, ctx.candidate_mean, degenerate);
  return assemble(
      order_of(ctx),
      [&](std::size_t j) { return set_quality * cosine(ctx.anchor_community_feature, a.row(j), degenerate); },
      [&](std::size_t j, std::size_t jp) {
        return cosine(x.row(j), a.row(jp), degenerate) * cosine(a.row(j), x.row(jp), degenerate) *
               std::exp(cosine(x.row(j), x.row(jp), degenerate) - 1.0);
      });
}

SymmetricMatrix build_community_kernel_raw(const KernelContext& ctx, bool* degenerate) {
  const auto& x = ctx.candidate_features;
  const auto& a = ctx.candidate_community_features;
  return assemble(
      order_of(ctx), [&](std::size_t j) { return cosine(ctx.anchor_community_feature, a.row(j), degenerate); },
      [&](std::size_t j, std::size_t jp) {
        return cosine(x.row(j), a.row(jp), degenerate) * cosine(a.row(j), x.row(jp), degenerate);
      });
}

SymmetricMatrix build_node_kernel_raw(const KernelContext& ctx, bool* degenerate) {
  const double set_quality = cosine(ctx.anchor_community_feature, ctx.candidate_mean, degenerate);
  const SymmetricMatrix base = build_cosine_kernel(ctx, degenerate);
  return assemble(
      order_of(ctx), [&](std::size_t) { return set_quality; },
      [&](std::size_t j, std::size_t jp) { return base(j, jp); });
}

EigenDecomposition psd_repair(SymmetricMatrix& l, double epsilon, double* extra_shift) {
  if (!(epsilon > 0.0)) throw UsageError("psd_repair: epsilon must be > 0");
  l.add_diagonal(epsilon);
  EigenDecomposition eig = eigendecompose(l);
  double shift = 0.0;
  const double lambda_min = eig.eigenvalues.back();
  if (lambda_min < 0.5 * epsilon) {
    shift = epsilon - lambda_min;
    l.add_diagonal(shift);
    for (double& v : eig.eigenvalues) v += shift;
  }
  if (extra_shift) *extra_shift = shift;
  return eig;
}

namespace {

BuiltKernel finish(SymmetricMatrix raw, bool degenerate, double epsilon) {
  BuiltKernel k;
  k.matrix = std::move(raw);
  k.degenerate = degenerate;
  k.eigen = psd_repair(k.matrix, epsilon, &k.repair_shift);
  return k;
}

}  // namespace

BuiltKernel build_qd_kernel(const KernelContext& ctx, double epsilon) {
  bool deg = false;
  auto raw = build_qd_kernel_raw(ctx, &deg);
  return finish(std::move(raw), deg, epsilon);
}

BuiltKernel build_community_kernel(const KernelContext& ctx, double epsilon) {
  bool deg = false;
  auto raw = build_community_kernel_raw(ctx, &deg);
  return finish(std::move(raw), deg, epsilon);
}

BuiltKernel build_node_kernel(const KernelContext& ctx, double epsilon) {
  bool deg = false;
  auto raw = build_node_kernel_raw(ctx, &deg);
  return finish(std::move(raw), deg, epsilon);
}

BuiltKernel build_kernel(const KernelContext& ctx, const KernelSpec& spec) {
  switch (spec.variant) {
    case KernelVariant::kQualityDiversity:
      return build_qd_kernel(ctx, spec.epsilon);
    case KernelVariant::kCommunity:
      return build_community_kernel(ctx, spec.epsilon);
    case KernelVariant::kNode:
      return build_node_kernel(ctx, spec.epsilon);
    case KernelVariant::kCosine: {
      bool deg = false;
      auto raw = build_cosine_kernel(ctx, &deg);
      return finish(std::move(raw), deg, spec.epsilon);
    }
  }
  throw UsageError("build_kernel: unknown variant");
}

double kdpp_probability(const SymmetricMatrix& l, const EigenDecomposition& eig,
                        std::span<const std::size_t> subset, int k) {
  if (k < 0 || subset.size() != static_cast<std::size_t>(k))
    throw UsageError("kdpp_probability: subset size must equal k");
  for (std::size_t i : subset)
    if (i >= l.order()) throw UsageError("kdpp_probability: index out of range");
  const double num = determinant(l.principal_submatrix(subset).dense());
  return num / EspTable(eig.eigenvalues, k).top();
}

double kdpp_probability(const SymmetricMatrix& l, std::span<const std::size_t> subset, int k) {
  if (k < 0 || subset.size() != static_cast<std::size_t>(k))
    throw UsageError("kdpp_probability: subset size must equal k");
  return kdpp_probability(l, eigendecompose(l), subset, k);
}

namespace {

// Chooses k eigenvector indices; may return fewer under fp pathology.
std::vector<std::size_t> select_eigenvectors(const EigenDecomposition& eig, const EspTable& e, int k, Rng& rng) {
  std::vector<std::size_t> chosen;
  int remaining = k;
  for (int v = e.m(); v >= 1 && remaining > 0; --v) {
    const double denom = e(remaining, v);
    const double ratio = denom > 0.0 ? eig.eigenvalues[v - 1] * e(remaining - 1, v - 1) / denom : 0.0;
    if (rng.uniform() < ratio) {
      chosen.push_back(static_cast<std::size_t>(v - 1));
      --remaining;
    }
  }
  return chosen;
}

void orthonormalize(std::vector<std::vector<double>>& basis) {
  // Modified Gram-Schmidt, two passes.
  for (int pass = 0; pass < 2; ++pass)
    for (std::size_t c = 0; c < basis.size(); ++c) {
      auto& v = basis[c];
      for (std::size_t b = 0; b < c; ++b) {
        const double proj = dot(v, basis[b]);
        for (std::size_t r = 0; r < v.size(); ++r) v[r] -= proj * basis[b][r];
      }
      const double nrm = norm2(v);
      if (nrm > 0.0)
        for (double& x : v) x /= nrm;
    }
}

}  // namespace

std::vector<std::size_t> sample_kdpp(const EigenDecomposition& eig, int k, Rng& rng) {
  const std::size_t m = eig.eigenvalues.size();
  if (k < 0 || static_cast<std::size_t>(k) > m) throw UsageError("sample_kdpp: k must lie in [0, order]");
  if (k == 0) return {};

  const EspTable e(eig.eigenvalues, k);
  auto chosen = select_eigenvectors(eig, e, k, rng);
  if (chosen.size() != static_cast<std::size_t>(k)) chosen = select_eigenvectors(eig, e, k, rng);
  if (chosen.size() != static_cast<std::size_t>(k))
    throw NumericError("sample_kdpp: could not select " + std::to_string(k) + " eigenvectors");

  std::vector<std::vector<double>> basis;
  for (std::size_t j : chosen) {
    std::vector<double> col(m);
    for (std::size_t r = 0; r < m; ++r) col[r] = eig.eigenvectors(r, j);
    basis.push_back(std::move(col));
  }

  std::vector<std::size_t> out;
  std::vector<char> taken(m, 0);
  std::vector<double> weight(m);
  while (!basis.empty()) {
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double w = 0.0;
      if (!taken[i])
        for (const auto& v : basis) w += v[i] * v[i];
      weight[i] = w;
      total += w;
    }
    if (!(total > 0.0)) throw NumericError("sample_kdpp: projection lost all mass");

    const double u = rng.uniform() * total;
    std::size_t item = m;
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (weight[i] <= 0.0) continue;
      acc += weight[i];
      item = i;
      if (u < acc) break;
    }
    taken[item] = 1;
    out.push_back(item);

    // Restrict the span to vectors vanishing at `item`: eliminate that
    // coordinate using the basis vector with the largest entry there, drop
    // it, and re-orthonormalize the rest.
    std::size_t pivot = 0;
    for (std::size_t c = 1; c < basis.size(); ++c)
      if (std::abs(basis[c][item]) > std::abs(basis[pivot][item])) pivot = c;
    const std::vector<double> pv = basis[pivot];
    basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(pivot));
    for (auto& v : basis) {
      const double f = v[item] / pv[item];
      for (std::size_t r = 0; r < m; ++r) v[r] -= f * pv[r];
      v[item] = 0.0;
    }
    orthonormalize(basis);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> sample_kdpp(const SymmetricMatrix& l, int k, Rng& rng) {
  if (k < 0 || static_cast<std::size_t>(k) > l.order()) throw UsageError("sample_kdpp: k must lie in [0, order]");
  return sample_kdpp(eigendecompose(l), k, rng);
}

}  // namespace sdgcn
