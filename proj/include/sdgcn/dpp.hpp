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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sdgcn/graph.hpp"
#include "sdgcn/linalg.hpp"
#include "sdgcn/matrix.hpp"
#include "sdgcn/rng.hpp"

namespace sdgcn {

enum class KernelVariant {
  kCosine,            // exp(cos(x_j, x_j') - 1)
  kQualityDiversity,  // community-aware quality times feature/community diversity
  kCommunity,         // community terms only
  kNode,              // candidate-set quality times the cosine kernel
};

KernelVariant parse_kernel_variant(std::string_view name);
std::string_view to_string(KernelVariant v);

inline constexpr double kDefaultKernelJitter = 0.01;

struct KernelSpec {
  KernelVariant variant = KernelVariant::kQualityDiversity;
  double epsilon = kDefaultKernelJitter;
};

/// Everything a kernel builder needs about one anchor and its candidates.
struct KernelContext {
  NodeId anchor = 0;
  std::vector<NodeId> candidates;
  Matrix candidate_features;            // row j: x_j
  Matrix candidate_community_features;  // row j: a_{c(j)}
  std::vector<double> anchor_community_feature;  // a_{c(anchor)}
  std::vector<double> candidate_mean;            // b = mean of candidate rows
};

/// Gathers the rows a kernel needs from node embeddings `x` and the
/// community feature table. Throws UsageError if candidates are empty,
/// repeat, or contain the anchor, and DataError if any node lacks a valid
/// community.
KernelContext make_kernel_context(const Matrix& x, NodeId anchor, std::span<const NodeId> candidates,
                                  std::span<const int> membership, const Matrix& community_features);

struct BuiltKernel {
  SymmetricMatrix matrix;
  // Spectrum of `matrix` (after jitter and repair), reusable by the sampler.
  EigenDecomposition eigen;
  double repair_shift = 0.0;  // extra diagonal shift beyond epsilon
  bool degenerate = false;    // some cosine involved a zero-norm vector
};

// Raw kernels (no jitter). `degenerate` is set if a zero-norm vector occurs.
SymmetricMatrix build_cosine_kernel(const KernelContext& ctx, bool* degenerate = nullptr);
SymmetricMatrix build_qd_kernel_raw(const KernelContext& ctx, bool* degenerate = nullptr);
SymmetricMatrix build_community_kernel_raw(const KernelContext& ctx, bool* degenerate = nullptr);
SymmetricMatrix build_node_kernel_raw(const KernelContext& ctx, bool* degenerate = nullptr);

/// Adds epsilon*I, then, if the smallest eigenvalue is still below
/// epsilon/2, shifts the diagonal so it equals epsilon. Returns the
/// eigendecomposition of the repaired matrix.
EigenDecomposition psd_repair(SymmetricMatrix& l, double epsilon, double* extra_shift = nullptr);

BuiltKernel build_qd_kernel(const KernelContext& ctx, double epsilon = kDefaultKernelJitter);
BuiltKernel build_community_kernel(const KernelContext& ctx, double epsilon = kDefaultKernelJitter);
BuiltKernel build_node_kernel(const KernelContext& ctx, double epsilon = kDefaultKernelJitter);
// Dispatches on spec.variant; every variant goes through psd_repair.
BuiltKernel build_kernel(const KernelContext& ctx, const KernelSpec& spec);

/// k-DPP probability det(L_Y) / e_k(eigenvalues of L). Throws UsageError if
/// |Y| != k or an index is out of range.
double kdpp_probability(const SymmetricMatrix& l, std::span<const std::size_t> subset, int k);
double kdpp_probability(const SymmetricMatrix& l, const EigenDecomposition& eig,
                        std::span<const std::size_t> subset, int k);

/// Exact k-DPP sample via the spectral method: choose k eigenvectors with the
/// elementary-symmetric-polynomial recursion, then draw items one at a time
/// from the projection onto the remaining span. Returns k distinct indices,
/// ascending. Throws UsageError if k exceeds the order and NumericError if the
/// eigenvector selection fails twice.
std::vector<std::size_t> sample_kdpp(const SymmetricMatrix& l, int k, Rng& rng);
std::vector<std::size_t> sample_kdpp(const EigenDecomposition& eig, int k, Rng& rng);

}  // namespace sdgcn
