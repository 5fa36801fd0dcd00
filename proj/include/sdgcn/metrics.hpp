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
#include <vector>

#include "sdgcn/matrix.hpp"

namespace sdgcn {

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> row);

/// Fraction of masked rows whose argmax equals the label. Throws UsageError
/// on an empty mask.
double accuracy(const Matrix& logits, std::span<const int> labels, const std::vector<bool>& mask);

/// Mean Average Distance over all ordered pairs i != j with
/// D_ij = 1 - cos(x_i, x_j). Zero distances are excluded from each row mean
/// (anything below 1e-12 counts as zero) and zero row means from the
/// global mean; the result is 0 when every
/// distance is zero. Rows of zero norm give D_ij = 1 and set *degenerate.
/// Throws UsageError for fewer than two rows.
double mad(const Matrix& x, bool* degenerate = nullptr);

}  // namespace sdgcn
