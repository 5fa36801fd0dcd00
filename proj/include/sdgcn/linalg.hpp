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

#include <cstddef>
#include <span>
#include <vector>

#include "sdgcn/matrix.hpp"

namespace sdgcn {

/// Square matrix whose entries can only be written in mirrored pairs, so
/// exact symmetry holds by construction.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t order) : m_(order, order) {}

  // Throws UsageError unless m is square and exactly symmetric.
  static SymmetricMatrix from_dense(const Matrix& m);

  std::size_t order() const { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  void set(std::size_t i, std::size_t j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }
  void add_diagonal(double c) {
    for (std::size_t i = 0; i < order(); ++i) m_(i, i) += c;
  }
  SymmetricMatrix principal_submatrix(std::span<const std::size_t> idx) const;

  const Matrix& dense() const { return m_; }

 private:
  Matrix m_;
};

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // descending
  Matrix eigenvectors;              // column j pairs with eigenvalues[j]
  int sweeps = 0;
};

inline constexpr double kDefaultEigenTolerance = 1e-10;
inline constexpr int kMaxJacobiSweeps = 100;

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// tol * max(1, ||M||_F). Throws NumericError carrying the residual if that
/// does not happen within kMaxJacobiSweeps.
EigenDecomposition eigendecompose(const SymmetricMatrix& m, double tol = kDefaultEigenTolerance);

/// Table of elementary symmetric polynomials e[l][v] = e_l(lambda_1..lambda_v)
/// for l in [0, k], v in [0, m], built with
///   e[l][v] = e[l][v-1] + lambda_v * e[l-1][v-1].
class EspTable {
 public:
  EspTable(std::span<const double> eigenvalues, int k);

  double operator()(int l, int v) const { return e_[static_cast<std::size_t>(l) * (m_ + 1) + v]; }
  int k() const { return k_; }
  int m() const { return m_; }
  // e_k(lambda_1..lambda_m)
  double top() const { return (*this)(k_, m_); }

 private:
  int k_;
  int m_;
  std::vector<double> e_;
};

inline EspTable esp_table(std::span<const double> eigenvalues, int k) { return EspTable(eigenvalues, k); }

/// Determinant by LU with partial pivoting; |det| < 1e-300 is reported as 0.
double determinant(const Matrix& m);

}  // namespace sdgcn
