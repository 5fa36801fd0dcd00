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

// sdgcn command-line front end: generate | train | sample | eval.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "sdgcn/community.hpp"
#include "sdgcn/dpp.hpp"
#include "sdgcn/error.hpp"
#include "sdgcn/gnn.hpp"
#include "sdgcn/graph.hpp"
#include "sdgcn/negsamp.hpp"
#include "sdgcn/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sdgcn;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write '" + p.string() + "'");
  out << text;
}

// Git blob hash: sha1("blob <size>\0" + content).
std::string git_blob_sha1(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
  EVP_DigestUpdate(ctx, header.data(), header.size());
  EVP_DigestUpdate(ctx, content.data(), content.size());
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

// Appends `--key value` for every config entry whose flag is not already on
// the command line, so explicit flags win over the file.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") path = args[i + 1];
  for (const auto& a : args)
    if (a.starts_with("--config=")) path = a.substr(9);
  if (path.empty()) return args;

  json cfg;
  try {
    cfg = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw DataError("config '" + path + "': " + e.what());
  }
  if (!cfg.is_object()) throw DataError("config '" + path + "': expected a flat JSON object");
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    const bool present = std::any_of(args.begin(), args.end(),
                                     [&](const std::string& a) { return a == flag || a.starts_with(flag + "="); });
    if (present) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_string()) {
      args.push_back(flag);
      args.push_back(value.get<std::string>());
    } else if (value.is_number()) {
      args.push_back(flag);
      args.push_back(value.dump());
    } else {
      throw DataError("config '" + path + "': value of '" + key + "' must be a string, number or boolean");
    }
  }
  return args;
}

struct Options {
  std::uint64_t seed = 0;
  std::string out = "out";
  std::string config;

  // generate
  SbmParams sbm;
  std::string output;

  // shared graph input
  std::string graph;
  bool lcc = false;

  // train / sample
  int layers = 4;
  int hidden = 16;
  int epochs = 200;
  double lr = 0.01;
  std::string kernel = "qd";
  double epsilon = kDefaultKernelJitter;
  std::string neg = "sdgcn";
  int path_len = kDefaultPathLength;
  std::string anchors = "all";
  std::string resample = "per-epoch";
  double omega_init = 0.5;
  bool dump_communities = false;
  bool quiet = false;

  // sample
  std::uint64_t epoch = 0;
  bool verify = false;
  int verify_draws = 200000;

  // eval
  bool cost_report = false;
  double avg_path = -1.0;
  double avg_degree = -1.0;
  double num_nodes = -1.0;
};

Graph load_input(const Options& o) {
  Graph g = load_graph(o.graph);
  return o.lcc ? largest_connected_component(g) : g;
}

json graph_summary(const Graph& g) {
  const double n = static_cast<double>(g.num_nodes());
  return json{{"nodes", g.num_nodes()},
              {"edges", g.num_undirected_edges()},
              {"edge_slots", g.num_edge_slots()},
              {"avg_degree", n > 0 ? static_cast<double>(g.num_edge_slots()) / n : 0.0},
              {"feature_dim", g.feature_dim()},
              {"classes", g.num_classes()}};
}

TrainConfig train_config(const Options& o) {
  TrainConfig cfg;
  cfg.layers = o.layers;
  cfg.hidden_dim = o.hidden;
  cfg.epochs = o.epochs;
  cfg.lr = o.lr;
  cfg.seed = o.seed;
  cfg.kernel.variant = parse_kernel_variant(o.kernel);
  cfg.kernel.epsilon = o.epsilon;
  cfg.neg = parse_negative_strategy(o.neg);
  cfg.path_length = o.path_len;
  cfg.resample = parse_resample_policy(o.resample);
  cfg.omega_init = o.omega_init;
  cfg.anchors = parse_anchor_selection(o.anchors);
  return cfg;
}

int cmd_generate(const Options& o) {
  SbmParams p = o.sbm;
  p.seed = o.seed;
  const Graph g = generate_sbm(p);
  const fs::path path = o.output.empty() ? fs::path(o.out) / "graph.json" : fs::path(o.output);
  write_file(path, graph_to_json(g));
  const json s = graph_summary(g);
  std::cout << "wrote " << path.string() << ": n=" << s["nodes"] << " edges=" << s["edges"]
            << " avg_degree=" << s["avg_degree"].get<double>() << "\n";
  return 0;
}

int cmd_train(const Options& o) {
  const auto t0 = Clock::now();
  const std::string text = read_file(o.graph);
  Graph g = parse_graph_json(text);
  if (o.lcc) g = largest_connected_component(g);
  const double t_load = seconds_since(t0);

  const TrainConfig cfg = train_config(o);
  const auto t1 = Clock::now();
  const TrainResult r = train(g, cfg);
  const double t_train = seconds_since(t1);

  const fs::path dir(o.out);
  const auto t2 = Clock::now();
  write_file(dir / "trace.jsonl", trace_jsonl(r.trace));

  const EpochMetrics& last = r.trace.back();
  json summary{{"final", to_json(last)}, {"graph", graph_summary(g)}, {"config", to_json(cfg)}};
  if (r.communities) {
    summary["communities"] = {{"count", r.communities->num_communities},
                              {"converged", r.communities->converged},
                              {"sweeps", r.communities->sweeps}};
  }
  write_file(dir / "summary.json", summary.dump(2) + "\n");

  if (o.dump_communities) {
    const CommunityAssignment c =
        r.communities ? *r.communities : training_communities(g, o.seed);
    write_file(dir / "communities.json", json(c.membership).dump() + "\n");
  }
  const double t_write = seconds_since(t2);

  json manifest{{"command", "train"},
                {"config", to_json(cfg)},
                {"graph", {{"path", o.graph}, {"lcc", o.lcc}, {"sha1", git_blob_sha1(text)}}},
                {"timings_s", {{"load", t_load}, {"train", t_train}, {"write", t_write}, {"total", seconds_since(t0)}}}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");

  if (!o.quiet) {
    std::cout << "epochs=" << cfg.epochs << " loss=" << last.loss;
    if (last.train_acc) std::cout << " train_acc=" << *last.train_acc;
    if (last.val_acc) std::cout << " val_acc=" << *last.val_acc;
    if (last.test_acc) std::cout << " test_acc=" << *last.test_acc;
    std::cout << " mad=" << last.mad << "\n";
  }
  return 0;
}

// Draws from the configured kernel on a <= 7-node induced subgraph and
// compares subset frequencies with the exact k-DPP law.
bool verify_sampler(const Graph& g, const Options& o) {
  std::vector<NodeId> nodes;
  for (const auto& level : bfs_distance_partition(g, 0, static_cast<int>(g.num_nodes()) + 1).levels)
    for (NodeId v : level)
      if (nodes.size() < 7) nodes.push_back(v);
  for (std::size_t v = 0; v < g.num_nodes() && nodes.size() < 7; ++v)
    if (std::find(nodes.begin(), nodes.end(), static_cast<NodeId>(v)) == nodes.end())
      nodes.push_back(static_cast<NodeId>(v));
  std::sort(nodes.begin(), nodes.end());
  const Graph sub = g.induced_subgraph(nodes);
  if (sub.num_nodes() < 2) throw DataError("--verify needs a graph with at least two nodes");

  const CommunityAssignment comm = label_propagation(sub, o.seed);
  std::vector<NodeId> candidates(sub.num_nodes() - 1);
  std::iota(candidates.begin(), candidates.end(), 1);
  const KernelContext kc = make_kernel_context(sub.features(), 0, candidates, comm.membership, comm.community_features);
  KernelSpec spec{parse_kernel_variant(o.kernel), o.epsilon};
  const BuiltKernel kernel = build_kernel(kc, spec);
  const std::size_t m = candidates.size();

  bool ok = true;
  for (int k = 1; k <= 3 && static_cast<std::size_t>(k) <= m; ++k) {
    std::map<std::vector<std::size_t>, std::size_t> counts;
    Rng rng = Rng::stream(o.seed, 0x7e51, static_cast<std::uint64_t>(k));
    for (int d = 0; d < o.verify_draws; ++d) ++counts[sample_kdpp(kernel.eigen, k, rng)];
    // Enumerate every k-subset for the exact law.
    std::vector<std::size_t> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    double tv = 0.0;
    while (true) {
      const double p = kdpp_probability(kernel.matrix, kernel.eigen, idx, k);
      auto it = counts.find(idx);
      const double f = it == counts.end() ? 0.0 : static_cast<double>(it->second) / o.verify_draws;
      tv += std::abs(f - p);
      int pos = k - 1;
      while (pos >= 0 && idx[pos] == m - static_cast<std::size_t>(k) + static_cast<std::size_t>(pos)) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int q = pos + 1; q < k; ++q) idx[q] = idx[q - 1] + 1;
    }
    tv *= 0.5;
    const bool pass = tv < 0.02;
    ok = ok && pass;
    std::cout << "verify kernel=" << o.kernel << " order=" << m << " k=" << k << " draws=" << o.verify_draws
              << " TV=" << tv << (pass ? " < 0.02 ok" : " >= 0.02 FAIL") << "\n";
  }
  return ok;
}

int cmd_sample(const Options& o) {
  const Graph g = load_input(o);
  const TrainConfig cfg = train_config(o);
  const auto anchors = training_anchors(g, cfg);

  NegativeSampleTable table;
  std::optional<CommunityAssignment> comm;
  if (cfg.neg == NegativeStrategy::kSdgcn || cfg.neg == NegativeStrategy::kFullDpp) {
    comm = training_communities(g, o.seed);
    SamplingContext ctx;
    ctx.graph = &g;
    ctx.embeddings = &g.features();
    ctx.communities = &*comm;
    ctx.kernel = cfg.kernel;
    ctx.seed = o.seed;
    ctx.epoch = o.epoch;
    table = cfg.neg == NegativeStrategy::kFullDpp ? diverse_negatives_full(ctx, anchors)
                                                  : diverse_negatives_sp(ctx, anchors, cfg.path_length);
  } else if (cfg.neg == NegativeStrategy::kRandom) {
    table = random_negatives(g, anchors, o.seed, o.epoch);
  } else {
    table.negatives.resize(g.num_nodes());
    table.is_anchor.assign(g.num_nodes(), 0);
    table.fallback.assign(g.num_nodes(), 0);
  }

  std::size_t fallbacks = 0;
  for (char f : table.fallback) fallbacks += f != 0;
  const fs::path path = fs::path(o.out) / "negatives.json";
  write_file(path, to_json(table).dump() + "\n");
  std::cout << "wrote " << path.string() << ": anchors=" << anchors.size() << " negatives=" << table.total_negatives()
            << " fallbacks=" << fallbacks << "\n";
  if (o.dump_communities && comm) write_file(fs::path(o.out) / "communities.json", json(comm->membership).dump() + "\n");

  if (o.verify && !verify_sampler(g, o)) return kExitNumeric;
  return 0;
}

int cmd_eval(const Options& o) {
  json report;
  std::optional<Graph> g;
  if (!o.graph.empty()) {
    g = load_input(o);
    report["graph"] = graph_summary(*g);
    int components = 0;
    connected_components(*g, &components);
    report["graph"]["components"] = components;
    report["graph"]["lcc_nodes"] = g->num_nodes() ? largest_connected_component(*g).num_nodes() : 0;
    report["graph"]["max_degree"] = g->max_degree();

    // Candidate-set sizes over every node with the configured path length.
    std::size_t max_size = 0, empty = 0;
    double total = 0.0;
    const std::size_t bound = static_cast<std::size_t>(o.path_len - 1) * (1 + g->max_degree());
    for (std::size_t i = 0; i < g->num_nodes(); ++i) {
      Rng rng = Rng::stream(o.seed, static_cast<std::uint64_t>(i)).split(1);
      const auto cs = build_candidates_shortest_path(*g, g->features(), static_cast<NodeId>(i), o.path_len, rng);
      max_size = std::max(max_size, cs.members.size());
      total += static_cast<double>(cs.members.size());
      empty += cs.members.empty();
    }
    report["candidates"] = {{"path_len", o.path_len},
                            {"mean_size", g->num_nodes() ? total / static_cast<double>(g->num_nodes()) : 0.0},
                            {"max_size", max_size},
                            {"bound", bound},
                            {"within_bound", max_size <= bound},
                            {"empty", empty}};
  }

  if (o.cost_report) {
    const double pa = o.avg_path > 0 ? o.avg_path : static_cast<double>(o.path_len - 1);
    double deg = o.avg_degree, n = o.num_nodes;
    if (g) {
      if (deg <= 0) deg = report["graph"]["avg_degree"].get<double>();
      if (n <= 0) n = static_cast<double>(g->num_nodes());
    }
    if (deg <= 0 || n <= 0) throw UsageError("--cost-report needs --graph or both --avg-degree and --nodes");
    const auto c = candidate_cost_report(pa, deg, n);
    report["cost"] = {{"avg_path_nodes", c.avg_path_nodes},
                      {"avg_degree", c.avg_degree},
                      {"nodes", c.num_nodes},
                      {"candidate_cost", c.candidate_cost},
                      {"full_cost", c.full_cost},
                      {"ratio", c.full_cost / c.candidate_cost}};
    std::cout << std::setprecision(6) << "candidate cost (pa * deg)^3 = (" << pa << " * " << deg
              << ")^3 = " << c.candidate_cost << "\n"
              << "full cost N^3 = " << n << "^3 = " << c.full_cost << "\n"
              << "ratio = " << c.full_cost / c.candidate_cost << "\n";
  }
  if (report.is_null()) throw UsageError("eval needs --graph and/or --cost-report");
  std::cout << report.dump(2) << "\n";
  return 0;
}

void add_graph_input(CLI::App* cmd, Options& o, bool required) {
  auto* opt = cmd->add_option("--graph", o.graph, "Graph JSON file");
  if (required) opt->required();
  cmd->add_flag("--lcc", o.lcc, "Restrict to the largest connected component");
}

void add_sampling(CLI::App* cmd, Options& o) {
  cmd->add_option("--kernel", o.kernel, "L-ensemble: qd | community | node | cosine")->capture_default_str();
  cmd->add_option("--epsilon", o.epsilon, "Diagonal jitter added to every kernel")->capture_default_str();
  cmd->add_option("--neg", o.neg, "Negatives: sdgcn | full-dpp | random | none")->capture_default_str();
  cmd->add_option("--path-len", o.path_len, "Maximum shortest-path length L")->capture_default_str();
  cmd->add_option("--anchors", o.anchors, "Anchors: all | deg1 | topk:F | rand:F")->capture_default_str();
  cmd->add_flag("--dump-communities", o.dump_communities, "Write communities.json");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Diverse negative sampling for graph convolutional networks"};
  app.require_subcommand(1);
  app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
  app.add_option("--out", o.out, "Output directory")->capture_default_str();
  app.add_option("--config", o.config, "Flat JSON object of flag values; explicit flags take precedence");

  auto* gen = app.add_subcommand("generate", "Write a stochastic block model graph");
  gen->add_option("--blocks", o.sbm.blocks, "Number of blocks")->capture_default_str();
  gen->add_option("--per-block", o.sbm.nodes_per_block, "Nodes per block")->capture_default_str();
  gen->add_option("--p-in", o.sbm.p_in, "Intra-block edge probability")->capture_default_str();
  gen->add_option("--p-out", o.sbm.p_out, "Inter-block edge probability")->capture_default_str();
  gen->add_option("--dim", o.sbm.feature_dim, "Feature dimension")->capture_default_str();
  gen->add_option("--noise", o.sbm.feature_noise, "Feature noise sigma")->capture_default_str();
  gen->add_option("-o,--output", o.output, "Output file (default <out>/graph.json)");

  auto* tr = app.add_subcommand("train", "Train GCN / SDGCN and write trace.jsonl, summary.json, manifest.json");
  add_graph_input(tr, o, true);
  add_sampling(tr, o);
  tr->add_option("--layers", o.layers, "Number of layers")->capture_default_str();
  tr->add_option("--hidden", o.hidden, "Hidden width")->capture_default_str();
  tr->add_option("--epochs", o.epochs, "Training epochs")->capture_default_str();
  tr->add_option("--lr", o.lr, "Adam learning rate")->capture_default_str();
  tr->add_option("--resample", o.resample, "per-epoch | per-layer")->capture_default_str();
  tr->add_option("--omega-init", o.omega_init, "Initial negative weight")->capture_default_str();
  tr->add_flag("--quiet", o.quiet, "Suppress the final summary line");

  auto* sa = app.add_subcommand("sample", "Build one negative-sample table and write negatives.json");
  add_graph_input(sa, o, true);
  add_sampling(sa, o);
  sa->add_option("--epoch", o.epoch, "Epoch index of the sampling stream")->capture_default_str();
  sa->add_flag("--verify", o.verify, "Check sampler frequencies against the exact law on a small subgraph");
  sa->add_option("--verify-draws", o.verify_draws, "Draws per k for --verify")->capture_default_str();

  auto* ev = app.add_subcommand("eval", "Graph statistics and candidate-cost report");
  add_graph_input(ev, o, false);
  ev->add_option("--path-len", o.path_len, "Maximum shortest-path length L")->capture_default_str();
  ev->add_flag("--cost-report", o.cost_report, "Print (pa*deg)^3 versus N^3");
  ev->add_option("--avg-path", o.avg_path, "Path endpoints per anchor (default L-1)");
  ev->add_option("--avg-degree", o.avg_degree, "Average degree (default from --graph)");
  ev->add_option("--nodes", o.num_nodes, "Node count (default from --graph)");

  for (auto* cmd : {gen, tr, sa, ev}) cmd->fallthrough();

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = merge_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);

    if (*gen) return cmd_generate(o);
    if (*tr) return cmd_train(o);
    if (*sa) return cmd_sample(o);
    if (*ev) return cmd_eval(o);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
