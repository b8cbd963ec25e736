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

#pragma once

#include <span>

#include "irelab/types.hpp"

namespace irelab::linalg {

/// Dense symmetric matrix. The constructor stores (A + A^T) / 2, so the
/// stored entries are exactly symmetric.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& a);

  Index dim() const noexcept { return a_.rows(); }
  const Matrix& matrix() const noexcept { return a_; }
  double operator()(Index i, Index j) const { return a_(i, j); }
  double trace() const { return a_.trace(); }

 private:
  Matrix a_;
};

/// Eigenpairs sorted by descending eigenvalue; eigvecs are orthonormal columns.
struct EigenDecomposition {
  Vector eigvals;
  Matrix eigvecs;

  Index dim() const noexcept { return eigvals.size(); }
};

struct JacobiOptions {
  double relative_tolerance = 1e-12;  // off-diagonal Frobenius norm vs ||A||_F
  int max_sweeps = 100;
};

/// Cyclic Jacobi eigensolver. Throws std::invalid_argument on non-finite input
/// and NonConvergenceError if the sweep budget is exhausted.
EigenDecomposition sym_eigh(const SymMatrix& a, const JacobiOptions& options = {});

/// P_{i:j} = sum_{k=i..j} u_k u_k^T with 1-based inclusive indices into the
/// descending eigenvalue order.
struct Projector {
  Matrix matrix;
  Index first = 1;
  Index last = 1;
  /// Set when a cut point splits a numerically degenerate cluster
  /// (|lambda_{i-1} - lambda_i| or |lambda_j - lambda_{j+1}| below gap_tolerance).
  bool degenerate_cut = false;
  double cut_gap = 0.0;

  Index rank() const noexcept { return last - first + 1; }
  Vector apply(const Vector& g) const { return matrix * g; }
};

inline constexpr double kDegenerateGap = 1e-8;

Projector spectral_projector(const EigenDecomposition& e, Index first, Index last,
                             double gap_tolerance = kDegenerateGap);

/// k-th smallest entry of |h| (1-based, multiplicity counted).
double kth_smallest_abs(std::span<const double> h, Index k);
double kth_smallest_abs(const Vector& h, Index k);

/// ||A V - V diag(lambda)||_F
double reconstruction_residual(const SymMatrix& a, const EigenDecomposition& e);
/// ||V^T V - I||_F
double orthonormality_residual(const EigenDecomposition& e);

}  // namespace irelab::linalg
