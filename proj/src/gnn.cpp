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

#include "sdgcn/gnn.hpp"

#include <algorithm>
#include <cmath>

#include "sdgcn/error.hpp"
#include "sdgcn/metrics.hpp"
#include "sdgcn/rng.hpp"

namespace sdgcn {

namespace {
// Stream-id namespaces so weight init, anchors and communities never share
// keys with per-epoch sampling streams (epoch ids start at 0).
constexpr std::uint64_t kInitStream = 0xffff0001;
constexpr std::uint64_t kAnchorStream = 0xffff0002;
constexpr std::uint64_t kCommunityStream = 0xffff0003;
}  // namespace

ModelState init_model(std::size_t in_dim, std::size_t hidden_dim, std::size_t num_classes, int depth,
                      std::uint64_t seed, double omega_init) {
  if (depth < 1) throw UsageError("init_model: depth must be >= 1");
  ModelState m;
  for (int l = 0; l < depth; ++l) {
    const std::size_t fan_in = l == 0 ? in_dim : hidden_dim;
    const std::size_t fan_out = l == depth - 1 ? num_classes : hidden_dim;
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Rng rng = Rng::stream(seed, kInitStream, static_cast<std::uint64_t>(l));
    LayerParams p;
    p.theta = Matrix(fan_in, fan_out);
    for (double& w : p.theta.data()) w = (2.0 * rng.uniform() - 1.0) * limit;
    p.omega = omega_init;
    m.adam_m_theta.emplace_back(fan_in, fan_out);
    m.adam_v_theta.emplace_back(fan_in, fan_out);
    m.layers.push_back(std::move(p));
  }
  m.adam_m_omega.assign(depth, 0.0);
  m.adam_v_omega.assign(depth, 0.0);
  return m;
}

double edge_norm(const Graph& g, NodeId i, NodeId j) {
  return 1.0 / std::sqrt(static_cast<double>(g.degree(i) + 1) * static_cast<double>(g.degree(j) + 1));
}

Matrix aggregate_positive(const Graph& g, const Matrix& p) {
  Matrix out(p.rows(), p.cols());
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    const auto u = static_cast<NodeId>(i);
    auto dst = out.row(i);
    const double self = edge_norm(g, u, u);
    auto src = p.row(i);
    for (std::size_t t = 0; t < dst.size(); ++t) dst[t] = self * src[t];
    for (NodeId j : g.neighbors(u)) {
      const double c = edge_norm(g, u, j);
      auto s = p.row(j);
      for (std::size_t t = 0; t < dst.size(); ++t) dst[t] += c * s[t];
    }
  }
  return out;
}

Matrix aggregate_negative(const Graph& g, const NegativeSampleTable& negs, const Matrix& p) {
  Matrix out(p.rows(), p.cols());
  for (std::size_t i = 0; i < negs.negatives.size(); ++i) {
    auto dst = out.row(i);
    for (NodeId j : negs.negatives[i]) {
      const double c = edge_norm(g, static_cast<NodeId>(i), j);
      auto s = p.row(j);
      for (std::size_t t = 0; t < dst.size(); ++t) dst[t] += c * s[t];
    }
  }
  return out;
}

Matrix aggregate_negative_transposed(const Graph& g, const NegativeSampleTable& negs, const Matrix& grad) {
  Matrix out(grad.rows(), grad.cols());
  for (std::size_t i = 0; i < negs.negatives.size(); ++i) {
    auto src = grad.row(i);
    for (NodeId j : negs.negatives[i]) {
      const double c = edge_norm(g, static_cast<NodeId>(i), j);
      auto dst = out.row(j);
      for (std::size_t t = 0; t < dst.size(); ++t) dst[t] += c * src[t];
    }
  }
  return out;
}

Matrix gcn_layer(const Matrix& x_in, const Graph& g, const Matrix& theta) {
  return aggregate_positive(g, matmul(x_in, theta));
}

namespace {

bool has_negatives(const NegativeSampleTable* negs) { return negs && !negs->empty(); }

// Z = A P - omega N P; fills `negative` when the negative term is active.
Matrix combine(const Graph& g, const Matrix& p, double omega, const NegativeSampleTable* negs, Matrix* negative) {
  Matrix z = aggregate_positive(g, p);
  if (!has_negatives(negs)) return z;
  Matrix np = aggregate_negative(g, *negs, p);
  if (omega != 0.0) {
    auto& zd = z.data();
    const auto& nd = np.data();
    for (std::size_t t = 0; t < zd.size(); ++t) zd[t] -= omega * nd[t];
  }
  if (negative) *negative = std::move(np);
  return z;
}

}  // namespace

Matrix sdgcn_layer(const Matrix& x_in, const Graph& g, const Matrix& theta, double omega,
                   const NegativeSampleTable* negs) {
  return combine(g, matmul(x_in, theta), omega, negs, nullptr);
}

TableProvider fixed_tables(const NegativeSampleTable* table) {
  return [table](std::size_t, const Matrix&) { return table; };
}

Matrix forward(ModelState& model, const Graph& g, const TableProvider& tables) {
  if (model.depth() == 0) throw UsageError("forward: model has no layers");
  model.cache.assign(model.depth(), LayerCache{});
  Matrix h = g.features();
  for (std::size_t l = 0; l < model.depth(); ++l) {
    LayerCache& c = model.cache[l];
    c.negatives = tables ? tables(l, h) : nullptr;
    c.projected = matmul(h, model.layers[l].theta);
    c.output = combine(g, c.projected, model.layers[l].omega, c.negatives, &c.negative);
    c.input = std::move(h);
    if (l + 1 < model.depth()) {
      h = c.output;
      for (double& v : h.data()) v = std::max(v, 0.0);
    }
  }
  return model.cache.back().output;
}

Matrix forward(ModelState& model, const Graph& g, const NegativeSampleTable* negs) {
  return forward(model, g, fixed_tables(negs));
}

double cross_entropy(const Matrix& logits, std::span<const int> labels, const std::vector<bool>& mask,
                     Matrix* grad_logits) {
  std::size_t count = 0;
  for (bool b : mask) count += b;
  if (count == 0) throw UsageError("cross_entropy: empty training mask");
  if (grad_logits) *grad_logits = Matrix(logits.rows(), logits.cols());

  double loss = 0.0;
  std::vector<double> prob(logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    if (!mask[i]) continue;
    auto z = logits.row(i);
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < z.size(); ++c) sum += (prob[c] = std::exp(z[c] - zmax));
    const double log_sum = std::log(sum) + zmax;
    loss += log_sum - z[labels[i]];
    if (grad_logits) {
      auto gr = grad_logits->row(i);
      for (std::size_t c = 0; c < z.size(); ++c) gr[c] = prob[c] / sum / static_cast<double>(count);
      gr[labels[i]] -= 1.0 / static_cast<double>(count);
    }
  }
  return loss / static_cast<double>(count);
}

LossAndGradients loss_and_gradients(ModelState& model, const Graph& g, const TableProvider& tables,
                                    std::span<const int> labels, const std::vector<bool>& mask) {
  LossAndGradients out;
  out.logits = forward(model, g, tables);
  Matrix dz;
  out.loss = cross_entropy(out.logits, labels, mask, &dz);

  const std::size_t depth = model.depth();
  out.grads.theta.resize(depth);
  out.grads.omega.assign(depth, 0.0);
  for (std::size_t l = depth; l-- > 0;) {
    const LayerCache& c = model.cache[l];
    const double omega = model.layers[l].omega;
    // Z = A P - omega N P  =>  dP = A^T dZ - omega N^T dZ, domega = -<N P, dZ>.
    Matrix dp = aggregate_positive(g, dz);  // A is symmetric
    if (has_negatives(c.negatives)) {
      double dw = 0.0;
      for (std::size_t t = 0; t < dz.data().size(); ++t) dw -= c.negative.data()[t] * dz.data()[t];
      out.grads.omega[l] = dw;
      if (omega != 0.0) {
        const Matrix nt = aggregate_negative_transposed(g, *c.negatives, dz);
        for (std::size_t t = 0; t < dp.data().size(); ++t) dp.data()[t] -= omega * nt.data()[t];
      }
    }
    out.grads.theta[l] = matmul_tn(c.input, dp);
    if (l == 0) break;
    Matrix dh = matmul_nt(dp, model.layers[l].theta);
    // c.input is ReLU(previous Z); its positive entries mark where Z > 0.
    for (std::size_t t = 0; t < dh.data().size(); ++t)
      if (!(c.input.data()[t] > 0.0)) dh.data()[t] = 0.0;
    dz = std::move(dh);
  }
  return out;
}

void adam_step(ModelState& model, const Gradients& grads, const AdamConfig& cfg) {
  if (grads.theta.size() != model.depth() || grads.omega.size() != model.depth())
    throw UsageError("adam_step: gradient shape mismatch");
  ++model.step_count;
  const double t = static_cast<double>(model.step_count);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  auto update = [&](double& param, double& m, double& v, double grad) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad * grad;
    param -= cfg.lr * (m / bc1) / (std::sqrt(v / bc2) + cfg.eps);
  };
  for (std::size_t l = 0; l < model.depth(); ++l) {
    auto& w = model.layers[l].theta.data();
    const auto& gw = grads.theta[l].data();
    if (gw.size() != w.size()) throw UsageError("adam_step: gradient shape mismatch");
    auto& m = model.adam_m_theta[l].data();
    auto& v = model.adam_v_theta[l].data();
    for (std::size_t i = 0; i < w.size(); ++i) update(w[i], m[i], v[i], gw[i]);
    update(model.layers[l].omega, model.adam_m_omega[l], model.adam_v_omega[l], grads.omega[l]);
  }
}

NegativeStrategy parse_negative_strategy(std::string_view s) {
  if (s == "none") return NegativeStrategy::kNone;
  if (s == "sdgcn") return NegativeStrategy::kSdgcn;
  if (s == "full-dpp") return NegativeStrategy::kFullDpp;
  if (s == "random") return NegativeStrategy::kRandom;
  throw UsageError("unknown negative strategy '" + std::string(s) + "' (expected sdgcn|full-dpp|random|none)");
}

std::string_view to_string(NegativeStrategy s) {
  switch (s) {
    case NegativeStrategy::kNone:
      return "none";
    case NegativeStrategy::kSdgcn:
      return "sdgcn";
    case NegativeStrategy::kFullDpp:
      return "full-dpp";
    case NegativeStrategy::kRandom:
      return "random";
  }
  return "?";
}

ResamplePolicy parse_resample_policy(std::string_view s) {
  if (s == "per-epoch") return ResamplePolicy::kPerEpoch;
  if (s == "per-layer") return ResamplePolicy::kPerLayer;
  throw UsageError("unknown resample policy '" + std::string(s) + "' (expected per-epoch|per-layer)");
}

std::string_view to_string(ResamplePolicy p) { return p == ResamplePolicy::kPerEpoch ? "per-epoch" : "per-layer"; }

namespace {

std::optional<double> masked_accuracy(const Matrix& logits, const Graph& g, const std::vector<bool>& mask) {
  if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; })) return std::nullopt;
  return accuracy(logits, g.labels(), mask);
}

}  // namespace

CommunityAssignment training_communities(const Graph& g, std::uint64_t seed) {
  return label_propagation(g, Rng::mix(seed ^ kCommunityStream));
}

std::vector<NodeId> training_anchors(const Graph& g, const TrainConfig& cfg) {
  Rng rng = Rng::stream(cfg.seed, kAnchorStream);
  return select_anchor_nodes(g, cfg.anchors, rng);
}

TrainResult train(const Graph& g, const TrainConfig& cfg) {
  if (cfg.layers < 1) throw UsageError("train: layers must be >= 1");
  if (cfg.epochs < 1) throw UsageError("train: epochs must be >= 1");
  if (cfg.hidden_dim < 1) throw UsageError("train: hidden_dim must be >= 1");
  if (cfg.neg == NegativeStrategy::kFullDpp && g.num_nodes() > kFullDppMaxNodes)
    throw UsageError("train: --neg full-dpp supports at most " + std::to_string(kFullDppMaxNodes) +
                     " nodes; use --neg sdgcn for larger graphs");
  if (g.num_nodes() < 2) throw DataError("train: graph needs at least two nodes");

  TrainResult result;
  result.model = init_model(g.feature_dim(), static_cast<std::size_t>(cfg.hidden_dim),
                            static_cast<std::size_t>(g.num_classes()), cfg.layers, cfg.seed, cfg.omega_init);

  const bool dpp = cfg.neg == NegativeStrategy::kSdgcn || cfg.neg == NegativeStrategy::kFullDpp;
  if (dpp) result.communities = training_communities(g, cfg.seed);

  std::vector<NodeId> anchors;
  if (cfg.neg != NegativeStrategy::kNone) anchors = training_anchors(g, cfg);

  auto build_table = [&](const Matrix& embeddings, std::uint64_t epoch, std::uint64_t layer) {
    if (cfg.neg == NegativeStrategy::kRandom) return random_negatives(g, anchors, cfg.seed, epoch, layer);
    SamplingContext ctx;
    ctx.graph = &g;
    ctx.embeddings = &embeddings;
    ctx.communities = &*result.communities;
    ctx.kernel = cfg.kernel;
    ctx.seed = cfg.seed;
    ctx.epoch = epoch;
    ctx.layer = layer;
    return cfg.neg == NegativeStrategy::kFullDpp ? diverse_negatives_full(ctx, anchors)
                                                 : diverse_negatives_sp(ctx, anchors, cfg.path_length);
  };

  const AdamConfig adam{cfg.lr};
  std::vector<NegativeSampleTable> tables(static_cast<std::size_t>(cfg.layers));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto e = static_cast<std::uint64_t>(epoch);
    TableProvider provider;
    if (cfg.neg == NegativeStrategy::kNone) {
      provider = fixed_tables(nullptr);
    } else if (cfg.resample == ResamplePolicy::kPerEpoch) {
      tables[0] = build_table(g.features(), e, 0);
      provider = fixed_tables(&tables[0]);
    } else {
      provider = [&](std::size_t layer, const Matrix& input) {
        tables[layer] = build_table(input, e, layer);
        return &tables[layer];
      };
    }

    auto lg = loss_and_gradients(result.model, g, provider, g.labels(), g.masks().train);
    adam_step(result.model, lg.grads, adam);

    // Evaluate the updated parameters with the tables drawn this epoch.
    TableProvider frozen;
    if (cfg.neg == NegativeStrategy::kNone)
      frozen = fixed_tables(nullptr);
    else if (cfg.resample == ResamplePolicy::kPerEpoch)
      frozen = fixed_tables(&tables[0]);
    else
      frozen = [&](std::size_t layer, const Matrix&) { return &tables[layer]; };
    const Matrix logits = forward(result.model, g, frozen);

    EpochMetrics em;
    em.epoch = epoch;
    em.loss = lg.loss;
    em.train_acc = masked_accuracy(logits, g, g.masks().train);
    em.val_acc = masked_accuracy(logits, g, g.masks().val);
    em.test_acc = masked_accuracy(logits, g, g.masks().test);
    em.mad = mad(logits);
    for (const auto& p : result.model.layers) em.omega.push_back(p.omega);
    result.trace.push_back(std::move(em));
    if (epoch + 1 == cfg.epochs) result.final_logits = logits;
  }
  // The cache points into `tables`, which dies here.
  result.model.cache.clear();
  return result;
}

}  // namespace sdgcn
