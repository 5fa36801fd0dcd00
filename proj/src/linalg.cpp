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

#include "sdgcn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sdgcn/error.hpp"

namespace sdgcn {

SymmetricMatrix SymmetricMatrix::from_dense(const Matrix& m) {
  if (m.rows() != m.cols()) throw UsageError("SymmetricMatrix: matrix is not square");
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (m(i, j) != m(j, i)) throw UsageError("SymmetricMatrix: matrix is not symmetric");
  SymmetricMatrix s;
  s.m_ = m;
  return s;
}

SymmetricMatrix SymmetricMatrix::principal_submatrix(std::span<const std::size_t> idx) const {
  SymmetricMatrix s(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a; b < idx.size(); ++b) s.set(a, b, m_(idx[a], idx[b]));
  return s;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) s += 2.0 * a(i, j) * a(i, j);
  return std::sqrt(s);
}

double frobenius(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

// Annihilate a(p,q) with a rotation in the (p,q) plane, accumulating into v.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const std::size_t n = a.rows();
  const double apq = a(p, q);
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  // For huge theta, theta^2 would overflow; t -> 1 / (2 theta).
  const double t = std::abs(theta) > 1e150
                       ? 0.5 / theta
                       : (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const double tau = s / (1.0 + c);

  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = a(q, p) = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    if (r == p || r == q) continue;
    const double arp = a(r, p);
    const double arq = a(r, q);
    const double np = arp - s * (arq + tau * arp);
    const double nq = arq + s * (arp - tau * arq);
    a(r, p) = a(p, r) = np;
    a(r, q) = a(q, r) = nq;
  }
  for (std::size_t r = 0; r < n; ++r) {
    const double vrp = v(r, p);
    const double vrq = v(r, q);
    v(r, p) = vrp - s * (vrq + tau * vrp);
    v(r, q) = vrq + s * (vrp - tau * vrq);
  }
}

}  // namespace

EigenDecomposition eigendecompose(const SymmetricMatrix& m, double tol) {
  const std::size_t n = m.order();
  if (n == 0) throw UsageError("eigendecompose: empty matrix");
  Matrix a = m.dense();
  Matrix v = Matrix::identity(n);
  const double target = tol * std::max(1.0, frobenius(a));

  EigenDecomposition out;
  double off = off_diagonal_norm(a);
  while (off >= target) {
    if (out.sweeps == kMaxJacobiSweeps)
      throw NumericError("eigendecompose: no convergence after " + std::to_string(kMaxJacobiSweeps) +
                         " sweeps, off-diagonal norm " + std::to_string(off));
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q)
        if (a(p, q) != 0.0) rotate(a, v, p, q);
    ++out.sweeps;
    off = off_diagonal_norm(a);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = a(order[j], order[j]);
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, j) = v(r, order[j]);
  }
  return out;
}

EspTable::EspTable(std::span<const double> eigenvalues, int k) : k_(k), m_(static_cast<int>(eigenvalues.size())) {
  if (k < 0) throw UsageError("esp_table: k must be non-negative");
  if (k > m_) throw UsageError("esp_table: k exceeds the number of eigenvalues");
  e_.assign(static_cast<std::size_t>(k_ + 1) * (m_ + 1), 0.0);
  auto at = [&](int l, int v) -> double& { return e_[static_cast<std::size_t>(l) * (m_ + 1) + v]; };
  for (int v = 0; v <= m_; ++v) at(0, v) = 1.0;
  for (int l = 1; l <= k_; ++l)
    for (int v = l; v <= m_; ++v) at(l, v) = at(l, v - 1) + eigenvalues[v - 1] * at(l - 1, v - 1);
}

double determinant(const Matrix& m) {
  if (m.rows() != m.cols()) throw UsageError("determinant: matrix is not square");
  const std::size_t n = m.rows();
  Matrix a = m;
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (a(piv, col) == 0.0) return 0.0;
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(piv, c), a(col, c));
      det = -det;
    }
    const double d = a(col, col);
    det *= d;
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / d;
      if (f == 0.0) continue;
      for (std::size_t c = col + 1; c < n; ++c) a(r, c) -= f * a(col, c);
    }
  }
  return std::abs(det) < 1e-300 ? 0.0 : det;
}

}  // namespace sdgcn
