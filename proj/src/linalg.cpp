// Copyright 2026 The irelab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "irelab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace irelab::linalg {

SymMatrix::SymMatrix(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("SymMatrix: matrix is not square");
  if (a.rows() == 0) throw std::invalid_argument("SymMatrix: empty matrix");
  a_ = 0.5 * (a + a.transpose());
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  const Index n = a.rows();
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

// Applies the rotation that zeroes a(p, q) to both a and the accumulated v.
void rotate(Matrix& a, Matrix& v, Index p, Index q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const Index n = a.rows();

  for (Index k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (Index k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  // Exact zero and symmetry at the rotated pair.
  a(p, q) = 0.0;
  a(q, p) = 0.0;

  for (Index k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

EigenDecomposition sym_eigh(const SymMatrix& sym, const JacobiOptions& options) {
  const Matrix& input = sym.matrix();
  if (!input.allFinite()) throw std::invalid_argument("sym_eigh: matrix has non-finite entries");

  const Index n = input.rows();
  Matrix a = input;
  Matrix v = Matrix::Identity(n, n);
  const double threshold = options.relative_tolerance * a.norm();

  int sweep = 0;
  while (off_diagonal_norm(a) > threshold) {
    if (sweep++ >= options.max_sweeps)
      throw NonConvergenceError("sym_eigh: Jacobi sweeps exhausted");
    for (Index p = 0; p < n - 1; ++p)
      for (Index q = p + 1; q < n; ++q) rotate(a, v, p, q);
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return a(i, i) > a(j, j); });

  EigenDecomposition out;
  out.eigvals.resize(n);
  out.eigvecs.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.eigvals[k] = a(src, src);
    out.eigvecs.col(k) = v.col(src);
  }
  return out;
}

Projector spectral_projector(const EigenDecomposition& e, Index first, Index last,
                             double gap_tolerance) {
  const Index n = e.dim();
  if (first < 1 || last > n || first > last)
    throw std::out_of_range("spectral_projector: need 1 <= first <= last <= " + std::to_string(n));

  Projector out;
  out.first = first;
  out.last = last;
  const auto block = e.eigvecs.middleCols(first - 1, last - first + 1);
  out.matrix = block * block.transpose();
  // Symmetric by construction up to rounding; store it exactly symmetric.
  out.matrix = 0.5 * (out.matrix + out.matrix.transpose()).eval();

  double gap = std::numeric_limits<double>::infinity();
  if (first > 1) gap = std::min(gap, std::abs(e.eigvals[first - 2] - e.eigvals[first - 1]));
  if (last < n) gap = std::min(gap, std::abs(e.eigvals[last - 1] - e.eigvals[last]));
  out.cut_gap = gap;
  out.degenerate_cut = gap < gap_tolerance;
  return out;
}

double kth_smallest_abs(std::span<const double> h, Index k) {
  const auto n = static_cast<Index>(h.size());
  if (k < 1 || k > n)
    throw std::out_of_range("kth_smallest_abs: k must be in [1, " + std::to_string(n) + "]");
  std::vector<double> a(h.size());
  std::transform(h.begin(), h.end(), a.begin(), [](double x) { return std::abs(x); });
  auto kth = a.begin() + (k - 1);
  std::nth_element(a.begin(), kth, a.end());
  return *kth;
}

double kth_smallest_abs(const Vector& h, Index k) {
  return kth_smallest_abs(std::span<const double>(h.data(), static_cast<std::size_t>(h.size())), k);
}

double reconstruction_residual(const SymMatrix& a, const EigenDecomposition& e) {
  return (a.matrix() * e.eigvecs - e.eigvecs * e.eigvals.asDiagonal()).norm();
}

double orthonormality_residual(const EigenDecomposition& e) {
  const Index n = e.dim();
  return (e.eigvecs.transpose() * e.eigvecs - Matrix::Identity(n, n)).norm();
}

}  // namespace irelab::linalg
