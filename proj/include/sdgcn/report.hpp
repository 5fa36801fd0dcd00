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

#include <string>
#include <vector>

#include <json.hpp>

#include "sdgcn/gnn.hpp"
#include "sdgcn/negsamp.hpp"

namespace sdgcn {

// {epoch, loss, train_acc, val_acc, test_acc, mad, omega: [...]}; missing
// splits are null.
nlohmann::json to_json(const EpochMetrics& m);
// One compact JSON object per line, newline-terminated.
std::string trace_jsonl(const std::vector<EpochMetrics>& trace);

nlohmann::json to_json(const TrainConfig& cfg);
// Anchor id (as a string key) -> negative list, anchors only.
nlohmann::json to_json(const NegativeSampleTable& table);

}  // namespace sdgcn
