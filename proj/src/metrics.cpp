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

#include "sdgcn/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "sdgcn/error.hpp"

namespace sdgcn {

namespace {
// Parallel rows reach 1 - cos ~ 1e-16 through rounding; treat as identical.
constexpr double kZeroDistance = 1e-12;
}  // namespace

std::size_t argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < row.size(); ++c)
    if (row[c] > row[best]) best = c;
  return best;
}

double accuracy(const Matrix& logits, std::span<const int> labels, const std::vector<bool>& mask) {
  std::size_t total = 0, correct = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    ++total;
    if (static_cast<int>(argmax(logits.row(i))) == labels[i]) ++correct;
  }
  if (total == 0) throw UsageError("accuracy: empty mask");
  return static_cast<double>(correct) / static_cast<double>(total);
}

double mad(const Matrix& x, bool* degenerate) {
  const std::size_t n = x.rows();
  if (n < 2) throw UsageError("mad: need at least two rows");

  // Pre-normalise rows; zero rows stay zero and are tracked separately.
  Matrix u = x;
  std::vector<char> zero(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double nrm = norm2(u.row(i));
    if (nrm == 0.0) {
      zero[i] = 1;
      if (degenerate) *degenerate = true;
      continue;
    }
    for (double& v : u.row(i)) v /= nrm;
  }

  double sum_rows = 0.0;
  std::size_t nonzero_rows = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    std::size_t nonzero = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double d = (zero[i] || zero[j]) ? 1.0 : 1.0 - std::clamp(dot(u.row(i), u.row(j)), -1.0, 1.0);
      if (d < kZeroDistance) d = 0.0;
      if (d != 0.0) {
        sum += d;
        ++nonzero;
      }
    }
    const double di = nonzero ? sum / static_cast<double>(nonzero) : 0.0;
    if (di != 0.0) {
      sum_rows += di;
      ++nonzero_rows;
    }
  }
  return nonzero_rows ? sum_rows / static_cast<double>(nonzero_rows) : 0.0;
}

}  // namespace sdgcn
