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

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "irelab/linalg.hpp"
#include "irelab/rng.hpp"

using namespace irelab;
using namespace irelab::linalg;

namespace {

Matrix random_matrix(Index p, CounterRng& rng) {
  Matrix a(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j) a(i, j) = rng.normal();
  return a;
}

// Orthogonal matrix by modified Gram-Schmidt on a random square matrix.
Matrix random_orthogonal(Index p, CounterRng& rng) {
  Matrix q = random_matrix(p, rng);
  for (Index j = 0; j < p; ++j) {
    for (Index k = 0; k < j; ++k) q.col(j) -= q.col(k).dot(q.col(j)) * q.col(k);
    q.col(j).normalize();
  }
  return q;
}

// Largest eigenvalue by power iteration on A + shift I (shift makes it positive definite).
double power_iteration_max(const Matrix& a, CounterRng& rng) {
  const Index p = a.rows();
  const double shift = a.cwiseAbs().rowwise().sum().maxCoeff();
  const Matrix b = a + shift * Matrix::Identity(p, p);
  Vector x = rng.normal_vector(p).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 200000; ++it) {
    Vector y = b * x;
    const double next = x.dot(y);
    x = y.normalized();
    if (std::abs(next - lambda) <= 1e-14 * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda - shift;
}

}  // namespace

TEST_CASE("eigensolver recovers a planted spectrum") {
  CounterRng rng = CounterRng::stream(11, 0);
  for (Index p : {1, 2, 3, 7, 16, 33, 64}) {
    Vector planted(p);
    for (Index i = 0; i < p; ++i) planted[i] = static_cast<double>(p - i) - 0.5 * static_cast<double>(p) + 0.25;
    const Matrix q = random_orthogonal(p, rng);
    const SymMatrix a(q * planted.asDiagonal() * q.transpose());
    const auto e = sym_eigh(a);
    CHECK((e.eigvals - planted).cwiseAbs().maxCoeff() <= 1e-10 * static_cast<double>(p));
    CHECK(reconstruction_residual(a, e) <= 1e-9);
  }
}

TEST_CASE("largest eigenvalue agrees with power iteration") {
  CounterRng rng = CounterRng::stream(12, 0);
  for (int c = 0; c < 20; ++c) {
    const auto p = static_cast<Index>(2 + rng.below(15));
    const SymMatrix a(random_matrix(p, rng));
    const auto e = sym_eigh(a);
    const double oracle = power_iteration_max(a.matrix(), rng);
    CHECK(e.eigvals[0] == doctest::Approx(oracle).epsilon(1e-7));
  }
}

TEST_CASE("eigensolver residuals on random symmetric matrices") {
  CounterRng rng = CounterRng::stream(13, 0);
  for (int c = 0; c < 100; ++c) {
    const auto p = static_cast<Index>(1 + rng.below(64));
    const SymMatrix a(random_matrix(p, rng));
    const auto e = sym_eigh(a);
    CHECK(reconstruction_residual(a, e) <= 1e-8);
    CHECK(orthonormality_residual(e) <= 1e-8);
    for (Index i = 1; i < p; ++i) CHECK(e.eigvals[i - 1] >= e.eigvals[i]);
  }
}

TEST_CASE("eigensolver rejects non-finite input") {
  Matrix a = Matrix::Identity(3, 3);
  a(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(sym_eigh(SymMatrix(a)), std::invalid_argument);
}

TEST_CASE("SymMatrix symmetrizes its input") {
  Matrix a(2, 2);
  a << 1.0, 2.0, 4.0, 3.0;
  const SymMatrix s(a);
  CHECK(s(0, 1) == 3.0);
  CHECK(s(1, 0) == 3.0);
  CHECK(s.trace() == 4.0);
}

TEST_CASE("spectral projector is an orthogonal projector of the right rank") {
  CounterRng rng = CounterRng::stream(14, 0);
  const Index p = 9;
  const SymMatrix a(random_matrix(p, rng));
  const auto e = sym_eigh(a);
  for (Index first : {1, 3}) {
    const Index last = 7;
    const auto proj = spectral_projector(e, first, last);
    CHECK(proj.rank() == last - first + 1);
    CHECK((proj.matrix * proj.matrix - proj.matrix).norm() <= 1e-12);
    CHECK((proj.matrix - proj.matrix.transpose()).norm() <= 1e-14);
    CHECK(proj.matrix.trace() == doctest::Approx(static_cast<double>(proj.rank())));
    CHECK_FALSE(proj.degenerate_cut);
    for (Index k = 0; k < p; ++k) {
      const bool inside = k + 1 >= first && k + 1 <= last;
      const Vector u = e.eigvecs.col(k);
      CHECK((proj.apply(u) - (inside ? u : Vector::Zero(p))).norm() <= 1e-12);
    }
  }
}

TEST_CASE("spectral projector flags a cut through a degenerate cluster") {
  Vector d(4);
  d << 3.0, 1.0, 1.0, 0.0;
  const auto e = sym_eigh(SymMatrix(Matrix(d.asDiagonal())));
  CHECK(spectral_projector(e, 1, 2).degenerate_cut);
  CHECK_FALSE(spectral_projector(e, 1, 3).degenerate_cut);
  CHECK_THROWS(spectral_projector(e, 3, 2));
  CHECK_THROWS(spectral_projector(e, 0, 2));
  CHECK_THROWS(spectral_projector(e, 1, 5));
}

TEST_CASE("kth_smallest_abs matches sorting") {
  CounterRng rng = CounterRng::stream(15, 0);
  for (int c = 0; c < 200; ++c) {
    const auto p = static_cast<Index>(1 + rng.below(40));
    Vector h(p);
    for (Index i = 0; i < p; ++i) h[i] = rng.below(3) == 0 ? static_cast<double>(rng.below(3)) - 1.0 : rng.normal();
    std::vector<double> sorted(static_cast<std::size_t>(p));
    for (Index i = 0; i < p; ++i) sorted[static_cast<std::size_t>(i)] = std::abs(h[i]);
    std::sort(sorted.begin(), sorted.end());
    const auto k = static_cast<Index>(1 + rng.below(static_cast<std::uint64_t>(p)));
    CHECK(kth_smallest_abs(h, k) == sorted[static_cast<std::size_t>(k - 1)]);
  }
}
