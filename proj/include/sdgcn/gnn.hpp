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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sdgcn/community.hpp"
#include "sdgcn/dpp.hpp"
#include "sdgcn/graph.hpp"
#include "sdgcn/matrix.hpp"
#include "sdgcn/negsamp.hpp"

namespace sdgcn {

struct LayerParams {
  Matrix theta;  // d_in x d_out
  double omega = 0.5;
};

// Activations kept from the last forward pass for backpropagation.
struct LayerCache {
  Matrix input;      // H (layer input, after the previous ReLU)
  Matrix projected;  // P = H * theta
  Matrix negative;   // N * P, empty when the layer had no negatives
  Matrix output;     // Z = A * P - omega * N * P (pre-activation)
  const NegativeSampleTable* negatives = nullptr;
};

struct ModelState {
  std::vector<LayerParams> layers;
  std::vector<Matrix> adam_m_theta, adam_v_theta;
  std::vector<double> adam_m_omega, adam_v_omega;
  std::int64_t step_count = 0;
  std::vector<LayerCache> cache;

  std::size_t depth() const { return layers.size(); }
};

struct Gradients {
  std::vector<Matrix> theta;
  std::vector<double> omega;
};

/// Layer widths in -> hidden -> ... -> classes (depth layers), Glorot-uniform
/// weights drawn from `seed`, omega set to omega_init.
ModelState init_model(std::size_t in_dim, std::size_t hidden_dim, std::size_t num_classes, int depth,
                      std::uint64_t seed, double omega_init = 0.5);

/// Symmetric normalisation with self loops: (deg(i)+1)^-1/2 (deg(j)+1)^-1/2.
double edge_norm(const Graph& g, NodeId i, NodeId j);

// A * P with A the self-loop-normalised adjacency.
Matrix aggregate_positive(const Graph& g, const Matrix& p);
// N * P where row i sums edge_norm(i, j) * P_j over negatives j of i.
Matrix aggregate_negative(const Graph& g, const NegativeSampleTable& negs, const Matrix& p);
// N^T * G.
Matrix aggregate_negative_transposed(const Graph& g, const NegativeSampleTable& negs, const Matrix& grad);

Matrix gcn_layer(const Matrix& x_in, const Graph& g, const Matrix& theta);
/// Positive aggregation minus omega times the negative aggregation. With
/// omega == 0 or no negatives the result is exactly gcn_layer's.
Matrix sdgcn_layer(const Matrix& x_in, const Graph& g, const Matrix& theta, double omega,
                   const NegativeSampleTable* negs);

/// Supplies the negative table for a layer given that layer's input; may
/// return nullptr for "no negatives". The table must outlive the model's
/// cache.
using TableProvider = std::function<const NegativeSampleTable*(std::size_t layer, const Matrix& input)>;

TableProvider fixed_tables(const NegativeSampleTable* table);

/// Runs every layer (ReLU between layers, none after the last) and refreshes
/// model.cache. Returns the final layer output, used directly as class
/// logits.
Matrix forward(ModelState& model, const Graph& g, const TableProvider& tables);
Matrix forward(ModelState& model, const Graph& g, const NegativeSampleTable* negs = nullptr);

struct LossAndGradients {
  double loss = 0.0;
  Gradients grads;
  Matrix logits;
};

// Mean softmax cross-entropy over masked rows. Throws UsageError on an
// empty mask.
double cross_entropy(const Matrix& logits, std::span<const int> labels, const std::vector<bool>& mask,
                     Matrix* grad_logits = nullptr);

/// Forward pass plus reverse-mode gradients of the mean cross-entropy with
/// respect to every theta and omega.
LossAndGradients loss_and_gradients(ModelState& model, const Graph& g, const TableProvider& tables,
                                    std::span<const int> labels, const std::vector<bool>& mask);

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

void adam_step(ModelState& model, const Gradients& grads, const AdamConfig& cfg);

enum class NegativeStrategy { kNone, kSdgcn, kFullDpp, kRandom };
enum class ResamplePolicy { kPerEpoch, kPerLayer };

NegativeStrategy parse_negative_strategy(std::string_view s);
std::string_view to_string(NegativeStrategy s);
ResamplePolicy parse_resample_policy(std::string_view s);
std::string_view to_string(ResamplePolicy p);

struct TrainConfig {
  int layers = 4;
  int hidden_dim = 16;
  int epochs = 200;
  double lr = 0.01;
  std::uint64_t seed = 0;
  KernelSpec kernel;
  NegativeStrategy neg = NegativeStrategy::kSdgcn;
  int path_length = kDefaultPathLength;
  ResamplePolicy resample = ResamplePolicy::kPerEpoch;
  double omega_init = 0.5;
  AnchorSelection anchors;
};

struct EpochMetrics {
  int epoch = 0;
  double loss = 0.0;
  std::optional<double> train_acc, val_acc, test_acc;
  double mad = 0.0;
  std::vector<double> omega;
};

struct TrainResult {
  ModelState model;
  std::vector<EpochMetrics> trace;
  std::optional<CommunityAssignment> communities;
  Matrix final_logits;
};

// Communities and anchors exactly as train() derives them from cfg.seed.
CommunityAssignment training_communities(const Graph& g, std::uint64_t seed);
std::vector<NodeId> training_anchors(const Graph& g, const TrainConfig& cfg);

/// Each epoch: build negative tables (from layer-0 features per epoch, or
/// from every layer's input when resampling per layer), forward, backward,
/// Adam step, then evaluate with the same tables. Deterministic in cfg.seed.
TrainResult train(const Graph& g, const TrainConfig& cfg);

}  // namespace sdgcn
