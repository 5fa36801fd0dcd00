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

#include "sdgcn/report.hpp"

namespace sdgcn {

namespace {
nlohmann::json optional_value(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }
}  // namespace

nlohmann::json to_json(const EpochMetrics& m) {
  return nlohmann::json{{"epoch", m.epoch},
                        {"loss", m.loss},
                        {"train_acc", optional_value(m.train_acc)},
                        {"val_acc", optional_value(m.val_acc)},
                        {"test_acc", optional_value(m.test_acc)},
                        {"mad", m.mad},
                        {"omega", m.omega}};
}

std::string trace_jsonl(const std::vector<EpochMetrics>& trace) {
  std::string out;
  for (const auto& m : trace) {
    out += to_json(m).dump();
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const TrainConfig& cfg) {
  return nlohmann::json{{"layers", cfg.layers},
                        {"hidden", cfg.hidden_dim},
                        {"epochs", cfg.epochs},
                        {"lr", cfg.lr},
                        {"seed", cfg.seed},
                        {"kernel", std::string(to_string(cfg.kernel.variant))},
                        {"epsilon", cfg.kernel.epsilon},
                        {"neg", std::string(to_string(cfg.neg))},
                        {"path_len", cfg.path_length},
                        {"resample", std::string(to_string(cfg.resample))},
                        {"omega_init", cfg.omega_init},
                        {"anchors", to_string(cfg.anchors)}};
}

nlohmann::json to_json(const NegativeSampleTable& table) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < table.num_nodes(); ++i)
    if (table.is_anchor[i]) j[std::to_string(i)] = table.negatives[i];
  return j;
}

}  // namespace sdgcn
