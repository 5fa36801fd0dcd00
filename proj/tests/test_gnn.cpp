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

#include <doctest.h>

#include <cmath>
#include <numeric>

#include "sdgcn/error.hpp"
#include "sdgcn/gnn.hpp"
#include "test_util.hpp"

using namespace sdgcn;
using namespace sdgcn::testing;

namespace {

// D^-1/2 (A + I) D^-1/2 as a dense matrix, D = degree + 1.
Matrix dense_positive(const Graph& g) {
  const std::size_t n = g.num_nodes();
  Matrix a(n, n);
  std::vector<double> d(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = 1.0;
    for (std::size_t j = 0; j < n; ++j)
      if (g.has_edge(static_cast<NodeId>(i), static_cast<NodeId>(j))) {
        a(i, j) = 1.0;
        d[i] += 1.0;
      }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) /= std::sqrt(d[i] * d[j]);
  return a;
}

Matrix dense_negative(const Graph& g, const NegativeSampleTable& t) {
  const std::size_t n = g.num_nodes();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (NodeId j : t.negatives[i])
      m(i, j) += 1.0 / std::sqrt((g.degree(static_cast<NodeId>(i)) + 1.0) * (g.degree(j) + 1.0));
  return m;
}

NegativeSampleTable table_of(std::vector<std::vector<NodeId>> lists) {
  NegativeSampleTable t;
  t.is_anchor.assign(lists.size(), 1);
  t.fallback.assign(lists.size(), 0);
  t.negatives = std::move(lists);
  return t;
}

// Non-neighbour, non-self negatives drawn for every node.
NegativeSampleTable random_table(const Graph& g, Rng& rng) {
  NegativeSampleTable t = table_of(std::vector<std::vector<NodeId>>(g.num_nodes()));
  for (std::size_t i = 0; i < g.num_nodes(); ++i)
    t.negatives[i] = uniform_non_neighbors(g, static_cast<NodeId>(i), 2, rng);
  return t;
}

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

double max_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

Graph labelled_graph(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges, std::size_t d, int classes,
                     Rng& rng) {
  Matrix x = random_matrix(n, d, rng);
  std::vector<int> labels(n);
  for (int& l : labels) l = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(classes)));
  return Graph(n, edges, std::move(x), std::move(labels), all_train(n), classes);
}

// Straight-line forward pass on dense matrices.
Matrix forward_oracle(const ModelState& m, const Graph& g, const NegativeSampleTable* t) {
  const Matrix a = dense_positive(g);
  Matrix h = g.features();
  for (std::size_t l = 0; l < m.depth(); ++l) {
    Matrix agg = a;
    if (t) {
      const Matrix nm = dense_negative(g, *t);
      for (std::size_t i = 0; i < agg.data().size(); ++i) agg.data()[i] -= m.layers[l].omega * nm.data()[i];
    }
    h = matmul(agg, matmul(h, m.layers[l].theta));
    if (l + 1 < m.depth())
      for (double& v : h.data()) v = std::max(v, 0.0);
  }
  return h;
}

double loss_of(ModelState m, const Graph& g, const NegativeSampleTable* t) {
  return cross_entropy(forward(m, g, t), g.labels(), g.masks().train);
}

}  // namespace

TEST_CASE("gcn_layer: isolated node with identity weights is unchanged") {
  Matrix x(1, 3);
  x(0, 0) = 1.5;
  x(0, 1) = -2.0;
  x(0, 2) = 0.25;
  const Graph g(1, {}, x, {0}, all_train(1), 1);
  CHECK(gcn_layer(x, g, Matrix::identity(3)) == x);
}

TEST_CASE("gcn_layer: two connected nodes with identical features stay identical") {
  Matrix x(2, 2);
  x(0, 0) = x(1, 0) = 0.7;
  x(0, 1) = x(1, 1) = -0.3;
  const std::vector<std::pair<NodeId, NodeId>> e{{0, 1}};
  const Graph g(2, e, x, {0, 0}, all_train(2), 1);
  const Matrix out = gcn_layer(x, g, Matrix::identity(2));
  CHECK(out(0, 0) == out(1, 0));
  CHECK(out(0, 1) == out(1, 1));
}

TEST_CASE("gcn_layer: 3-node path matches the dense normalised-adjacency oracle") {
  Rng rng(1);
  const Graph g = path_graph(3, 4);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix theta = random_matrix(4, 3, rng);
    const Matrix ref = matmul(dense_positive(g), matmul(g.features(), theta));
    CHECK(max_diff(gcn_layer(g.features(), g, theta), ref) <= 1e-12);
  }
}

TEST_CASE("sdgcn_layer: omega = 0 and empty tables reproduce gcn_layer bit for bit") {
  Rng rng(2);
  const Graph g = erdos_renyi(15, 0.2, 4, 5);
  const Matrix theta = random_matrix(5, 3, rng);
  const Matrix base = gcn_layer(g.features(), g, theta);
  const NegativeSampleTable t = random_table(g, rng);
  CHECK(sdgcn_layer(g.features(), g, theta, 0.0, &t) == base);
  const NegativeSampleTable none = table_of(std::vector<std::vector<NodeId>>(g.num_nodes()));
  CHECK(sdgcn_layer(g.features(), g, theta, 0.8, &none) == base);
  CHECK(sdgcn_layer(g.features(), g, theta, 0.8, nullptr) == base);
  CHECK_FALSE(sdgcn_layer(g.features(), g, theta, 0.8, &t) == base);
}

TEST_CASE("sdgcn_layer: 5-cycle with a fixed table matches the dense two-matrix oracle") {
  const Graph g = cycle_graph(5, 3);
  const NegativeSampleTable t = table_of({{2, 3}, {3, 4}, {4, 0}, {0, 1}, {1, 2}});
  const Matrix theta = Matrix::identity(3);
  Matrix agg = dense_positive(g);
  const Matrix nm = dense_negative(g, t);
  for (std::size_t i = 0; i < agg.data().size(); ++i) agg.data()[i] -= nm.data()[i];
  // Every node has degree 2, so each negative weight is exactly 1/3.
  CHECK(nm(0, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const Matrix ref = matmul(agg, g.features());
  CHECK(max_diff(sdgcn_layer(g.features(), g, theta, 1.0, &t), ref) <= 1e-12);
}

TEST_CASE("forward: depth 1 returns the layer output; zero features give zero logits") {
  Rng rng(3);
  const Graph g = erdos_renyi(10, 0.3, 1, 4);
  const NegativeSampleTable t = random_table(g, rng);
  ModelState m = init_model(4, 8, 3, 1, 5);
  CHECK(forward(m, g, &t) == sdgcn_layer(g.features(), g, m.layers[0].theta, m.layers[0].omega, &t));

  const Graph zero(10, g.edge_list(), Matrix(10, 4), std::vector<int>(10, 0), all_train(10), 1);
  ModelState deep = init_model(4, 8, 3, 3, 5);
  const Matrix logits = forward(deep, zero, &t);
  for (double v : logits.data()) CHECK(v == 0.0);
}

TEST_CASE("forward: matches a straight-line dense oracle") {
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const Graph g = erdos_renyi(12, 0.25, static_cast<std::uint64_t>(trial), 5);
    const NegativeSampleTable t = random_table(g, rng);
    ModelState m = init_model(5, 7, 3, 3, static_cast<std::uint64_t>(trial), 0.3 + 0.1 * trial);
    CHECK(max_diff(forward(m, g, &t), forward_oracle(m, g, &t)) <= 1e-12);
    CHECK(max_diff(forward(m, g, nullptr), forward_oracle(m, g, nullptr)) <= 1e-12);
  }
}

TEST_CASE("forward: permuting node ids permutes the logits") {
  Rng rng(5);
  const Graph g = erdos_renyi(12, 0.3, 8, 4);
  const NegativeSampleTable t = random_table(g, rng);
  std::vector<NodeId> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(std::span<NodeId>(perm));

  std::vector<std::pair<NodeId, NodeId>> edges;
  for (auto [u, v] : g.edge_list()) edges.emplace_back(perm[u], perm[v]);
  Matrix x(12, 4);
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t c = 0; c < 4; ++c) x(perm[i], c) = g.features()(i, c);
  const Graph h(12, edges, std::move(x), std::vector<int>(12, 0), all_train(12), 1);
  NegativeSampleTable pt = table_of(std::vector<std::vector<NodeId>>(12));
  for (std::size_t i = 0; i < 12; ++i)
    for (NodeId j : t.negatives[i]) pt.negatives[perm[i]].push_back(perm[j]);

  ModelState a = init_model(4, 6, 3, 3, 2);
  ModelState b = init_model(4, 6, 3, 3, 2);
  const Matrix la = forward(a, g, &t);
  const Matrix lb = forward(b, h, &pt);
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(la(i, c) - lb(perm[i], c)) <= 1e-12);
}

TEST_CASE("cross_entropy: uniform logits give ln C") {
  for (std::size_t c : {2u, 3u, 7u}) {
    const Matrix logits(5, c);
    const std::vector<int> labels(5, 1);
    CHECK(cross_entropy(logits, labels, std::vector<bool>(5, true)) == doctest::Approx(std::log(double(c))));
  }
  CHECK_THROWS_AS(cross_entropy(Matrix(2, 2), std::vector<int>{0, 0}, std::vector<bool>(2, false)), UsageError);
}

TEST_CASE("cross_entropy: stays finite for huge logits") {
  Matrix logits(1, 3);
  logits(0, 0) = 1e6;
  logits(0, 1) = -1e6;
  const double l = cross_entropy(logits, std::vector<int>{1}, std::vector<bool>{true});
  CHECK(std::isfinite(l));
  CHECK(l == doctest::Approx(2e6));
}

TEST_CASE("loss_and_gradients: analytic gradients match central finite differences") {
  for (std::uint64_t draw = 0; draw < 20; ++draw) {
    const auto r = finite_difference_check(draw);
    CHECK(r.entries == 12 + 12 + 2);
    CHECK_MESSAGE(r.max_rel_error < 1e-4, "draw " << draw << ": max relative error " << r.max_rel_error);
  }
}

TEST_CASE("loss_and_gradients: omega gradient equals minus the positive-scale derivative when N = A") {
  // Negatives are each node itself plus its neighbours, so the negative
  // aggregation equals the positive one and Z = (1 - omega) A P.
  Rng rng(7);
  const Graph g = labelled_graph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}}, 3, 2, rng);
  NegativeSampleTable t = table_of(std::vector<std::vector<NodeId>>(6));
  for (NodeId i = 0; i < 6; ++i) {
    t.negatives[i].push_back(i);
    for (NodeId j : g.neighbors(i)) t.negatives[i].push_back(j);
  }
  ModelState m = init_model(3, 4, 2, 2, 3, 0.0);
  const auto lg = loss_and_gradients(m, g, fixed_tables(&t), g.labels(), g.masks().train);
  for (std::size_t l = 0; l < 2; ++l) {
    // d loss / d s for Z_l = s A P_l at s = 1, from scaling theta_l without negatives.
    const double h = 1e-6;
    ModelState plus = m, minus = m;
    for (double& w : plus.layers[l].theta.data()) w *= 1.0 + h;
    for (double& w : minus.layers[l].theta.data()) w *= 1.0 - h;
    const double ds = (loss_of(plus, g, nullptr) - loss_of(minus, g, nullptr)) / (2 * h);
    CHECK(lg.grads.omega[l] == doctest::Approx(-ds).epsilon(1e-6));
  }
}

TEST_CASE("adam_step") {
  SUBCASE("zero gradient leaves parameters unchanged and counts the step") {
    ModelState m = init_model(3, 4, 2, 2, 1);
    const ModelState before = m;
    Gradients g{{Matrix(3, 4), Matrix(4, 2)}, {0.0, 0.0}};
    adam_step(m, g, AdamConfig{});
    CHECK(m.step_count == 1);
    for (std::size_t l = 0; l < 2; ++l) {
      CHECK(m.layers[l].theta == before.layers[l].theta);
      CHECK(m.layers[l].omega == before.layers[l].omega);
    }
  }
  SUBCASE("first step with unit gradient moves by lr") {
    ModelState m = init_model(1, 1, 1, 1, 1, 0.5);
    const double w0 = m.layers[0].theta(0, 0);
    Matrix gw(1, 1);
    gw(0, 0) = 1.0;
    adam_step(m, Gradients{{gw}, {1.0}}, AdamConfig{0.01});
    CHECK(m.layers[0].theta(0, 0) - w0 == doctest::Approx(-0.01).epsilon(1e-6));
    CHECK(m.layers[0].omega == doctest::Approx(0.49).epsilon(1e-9));
  }
  SUBCASE("two steps with a constant gradient follow the hand recurrence") {
    const double g = 0.3, lr = 0.05, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ModelState m = init_model(1, 1, 1, 1, 2, 0.0);
    double w = m.layers[0].theta(0, 0);
    Matrix gw(1, 1);
    gw(0, 0) = g;
    const AdamConfig cfg{lr, b1, b2, eps};
    adam_step(m, Gradients{{gw}, {g}}, cfg);
    adam_step(m, Gradients{{gw}, {g}}, cfg);
    double mm = 0, vv = 0;
    for (int t = 1; t <= 2; ++t) {
      mm = b1 * mm + (1 - b1) * g;
      vv = b2 * vv + (1 - b2) * g * g;
      const double mhat = mm / (1 - std::pow(b1, t));
      const double vhat = vv / (1 - std::pow(b2, t));
      w -= lr * mhat / (std::sqrt(vhat) + eps);
    }
    CHECK(m.layers[0].theta(0, 0) == doctest::Approx(w).epsilon(1e-14));
    CHECK(m.step_count == 2);
  }
}

TEST_CASE("init_model: Glorot-uniform bounds and seed determinism") {
  const ModelState a = init_model(10, 16, 4, 3, 42);
  const ModelState b = init_model(10, 16, 4, 3, 42);
  const ModelState c = init_model(10, 16, 4, 3, 43);
  REQUIRE(a.depth() == 3);
  CHECK(a.layers[0].theta.rows() == 10);
  CHECK(a.layers[2].theta.cols() == 4);
  for (std::size_t l = 0; l < 3; ++l) {
    CHECK(a.layers[l].theta == b.layers[l].theta);
    CHECK_FALSE(a.layers[l].theta == c.layers[l].theta);
    CHECK(a.layers[l].omega == 0.5);
    const auto& th = a.layers[l].theta;
    const double limit = std::sqrt(6.0 / static_cast<double>(th.rows() + th.cols()));
    for (double w : th.data()) CHECK(std::abs(w) <= limit);
  }
  CHECK_THROWS_AS(init_model(3, 3, 3, 0, 1), UsageError);
}

TEST_CASE("train: plain GCN separates a noise-free two-clique SBM within 50 epochs") {
  SbmParams p;
  p.blocks = 2;
  p.nodes_per_block = 10;
  p.p_in = 1.0;
  p.p_out = 0.0;
  p.feature_noise = 0.0;
  p.feature_dim = 4;
  p.seed = 3;
  const Graph g = generate_sbm(p);
  TrainConfig cfg;
  cfg.layers = 2;
  cfg.epochs = 50;
  cfg.neg = NegativeStrategy::kNone;
  const auto r = train(g, cfg);
  bool reached = false;
  for (const auto& e : r.trace) reached = reached || *e.train_acc == 1.0;
  CHECK(reached);
}

TEST_CASE("train: same seed gives identical traces for every strategy") {
  SbmParams p;
  p.blocks = 3;
  p.nodes_per_block = 8;
  p.p_in = 0.5;
  p.p_out = 0.05;
  p.seed = 1;
  const Graph g = generate_sbm(p);
  for (auto neg : {NegativeStrategy::kNone, NegativeStrategy::kSdgcn, NegativeStrategy::kFullDpp,
                   NegativeStrategy::kRandom}) {
    for (auto rs : {ResamplePolicy::kPerEpoch, ResamplePolicy::kPerLayer}) {
      TrainConfig cfg;
      cfg.epochs = 5;
      cfg.neg = neg;
      cfg.resample = rs;
      cfg.seed = 9;
      const auto a = train(g, cfg);
      const auto b = train(g, cfg);
      REQUIRE(a.trace.size() == 5);
      for (std::size_t e = 0; e < 5; ++e) {
        CHECK(a.trace[e].loss == b.trace[e].loss);
        CHECK(a.trace[e].mad == b.trace[e].mad);
        CHECK(a.trace[e].omega == b.trace[e].omega);
        CHECK(a.trace[e].val_acc == b.trace[e].val_acc);
        CHECK(std::isfinite(a.trace[e].loss));
      }
      CHECK(a.final_logits == b.final_logits);
    }
  }
}

TEST_CASE("train: negatives change the run only once they are sampled") {
  SbmParams p;
  p.blocks = 3;
  p.nodes_per_block = 8;
  p.p_in = 0.5;
  p.p_out = 0.05;
  const Graph g = generate_sbm(p);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.neg = NegativeStrategy::kNone;
  const auto plain = train(g, cfg);
  cfg.neg = NegativeStrategy::kSdgcn;
  const auto neg = train(g, cfg);
  // Same initial weights, different first-epoch loss because the negative
  // term is active from the first forward pass.
  CHECK(plain.trace[0].loss != neg.trace[0].loss);
  cfg.omega_init = 0.0;
  const auto zero = train(g, cfg);
  CHECK(plain.trace[0].loss == zero.trace[0].loss);
  // omega is trained away from its initial value.
  CHECK(neg.trace.back().omega[0] != 0.5);
}

TEST_CASE("train: configuration errors") {
  const Graph g = path_graph(4);
  TrainConfig cfg;
  cfg.layers = 0;
  CHECK_THROWS_AS(train(g, cfg), UsageError);
  cfg.layers = 2;
  cfg.epochs = 0;
  CHECK_THROWS_AS(train(g, cfg), UsageError);
}

TEST_CASE("strategy and policy names round-trip") {
  for (auto s : {NegativeStrategy::kNone, NegativeStrategy::kSdgcn, NegativeStrategy::kFullDpp,
                 NegativeStrategy::kRandom})
    CHECK(parse_negative_strategy(to_string(s)) == s);
  for (auto p : {ResamplePolicy::kPerEpoch, ResamplePolicy::kPerLayer}) CHECK(parse_resample_policy(to_string(p)) == p);
  CHECK_THROWS_AS(parse_negative_strategy("pgcn"), UsageError);
  CHECK_THROWS_AS(parse_resample_policy("never"), UsageError);
}
