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

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "doctest.h"
#include "irelab/landscape.hpp"
#include "irelab/landscapes.hpp"
#include "irelab/linalg.hpp"
#include "irelab/theory.hpp"

using namespace irelab;

namespace {

Vector fd_grad(const Landscape& L, const Vector& theta, double h = 1e-6) {
  Vector g(theta.size());
  for (Index i = 0; i < theta.size(); ++i) {
    Vector a = theta, b = theta;
    a[i] += h;
    b[i] -= h;
    g[i] = (L.loss(a) - L.loss(b)) / (2 * h);
  }
  return g;
}

Matrix fd_hessian(const Landscape& L, const Vector& theta, double h = 1e-5) {
  const Index p = theta.size();
  Matrix H(p, p);
  for (Index i = 0; i < p; ++i) {
    Vector a = theta, b = theta;
    a[i] += h;
    b[i] -= h;
    H.col(i) = (L.grad(a) - L.grad(b)) / (2 * h);
  }
  return 0.5 * (H + H.transpose());
}

std::vector<std::unique_ptr<Landscape>> all_landscapes() {
  std::vector<std::unique_ptr<Landscape>> out;
  out.push_back(std::make_unique<Toy2D>());
  out.push_back(std::make_unique<QuadraticValley>(QuadraticValley::default_instance()));
  out.push_back(std::make_unique<InterpolatingRegression>(InterpolatingRegression::default_instance()));
  out.push_back(std::make_unique<SoftmaxModel>(SoftmaxModel::default_instance()));
  return out;
}

}  // namespace

TEST_CASE("gradients match central differences of the loss") {
  CounterRng rng = CounterRng::stream(21, 0);
  for (const auto& L : all_landscapes()) {
    CAPTURE(L->name());
    for (int c = 0; c < 3; ++c) {
      const Vector theta = 0.5 * rng.normal_vector(L->dim());
      const Vector g = L->grad(theta);
      CHECK((g - fd_grad(*L, theta)).norm() <= 1e-6 * (1.0 + g.norm()));
    }
  }
}

TEST_CASE("Hessians match differences of the gradient") {
  CounterRng rng = CounterRng::stream(22, 0);
  for (const auto& L : all_landscapes()) {
    CAPTURE(L->name());
    const Vector theta = 0.5 * rng.normal_vector(L->dim());
    const Matrix H = L->hessian(theta).matrix();
    CHECK((H - fd_hessian(*L, theta)).norm() <= 1e-5 * (1.0 + H.norm()));
    CHECK((L->diag_hessian(theta) - H.diagonal()).norm() <= 1e-4 * (1.0 + H.norm()));
  }
}

TEST_CASE("sample losses and gradients average to the full objective") {
  CounterRng rng = CounterRng::stream(23, 0);
  for (const auto& L : all_landscapes()) {
    CAPTURE(L->name());
    const Vector theta = 0.5 * rng.normal_vector(L->dim());
    double loss = 0.0;
    Vector g = Vector::Zero(L->dim());
    for (Index i = 0; i < L->num_samples(); ++i) {
      loss += L->sample_loss(i, theta);
      g += L->sample_grad(i, theta);
    }
    const double n = static_cast<double>(L->num_samples());
    CHECK(loss / n == doctest::Approx(L->loss(theta)).epsilon(1e-12));
    CHECK((g / n - L->grad(theta)).norm() <= 1e-12 * (1.0 + g.norm()));
  }
}

TEST_CASE("Toy2D closed forms") {
  const Toy2D toy;
  CHECK(toy.loss(Vector{{2.0, 1.0}}) == 2.5);
  CHECK(toy.grad(Vector{{2.0, 1.0}}) == Vector{{2.0, 5.0}});
  CHECK(theory::trace_hessian(toy, Vector{{2.0, 1.0}}) == doctest::Approx(6.0));
  CHECK(theory::trace_hessian(toy, Vector{{0.0, 0.0}}) == doctest::Approx(1.0));
  const auto tg = toy.manifold_trace_grad(Vector{{1.5, 0.0}});
  REQUIRE(tg);
  CHECK((*tg - Vector{{3.0, 0.0}}).norm() <= 1e-15);
}

TEST_CASE("invalid points are rejected") {
  const Toy2D toy;
  CHECK_THROWS_AS(toy.loss(Vector::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(toy.loss(Vector{{std::numeric_limits<double>::quiet_NaN(), 0.0}}), DivergenceError);
  CHECK_THROWS_AS(toy.grad(Vector{{2e6, 0.0}}), DivergenceError);
  CHECK_THROWS(toy.sample_loss(1, Vector::Zero(2)));
  CHECK_THROWS_AS(toy.sampled_label_grad(Vector::Zero(2), *std::make_unique<CounterRng>()), std::logic_error);
}

TEST_CASE("valley is zero on its manifold with the planted spectrum") {
  const auto valley = QuadraticValley::default_instance();
  Vector z = Vector::Zero(10);
  z.head(7) << 0.3, -0.1, 0.2, 0.0, 0.4, -0.2, 0.1;
  CHECK(valley.loss(z) == 0.0);
  CHECK(valley.grad(z).norm() == 0.0);
  const double u2 = z.head(7).squaredNorm();
  const auto e = linalg::sym_eigh(valley.hessian(z));
  CHECK(e.eigvals[0] == doctest::Approx(3.0 + u2));
  CHECK(e.eigvals[1] == doctest::Approx(2.0 + u2));
  CHECK(e.eigvals[2] == doctest::Approx(1.0 + u2));
  for (Index i = 3; i < 10; ++i) CHECK(std::abs(e.eigvals[i]) <= 1e-12);
  CHECK(theory::trace_hessian(valley, z) == doctest::Approx(6.0 + 3.0 * u2));
  const auto tg = valley.manifold_trace_grad(z);
  REQUIRE(tg);
  const Vector fd = theory::trace_hessian_grad_fd(valley, z);
  CHECK((*tg - fd).norm() <= 1e-6);
}

TEST_CASE("regression Hessian at an interpolating point has rank n") {
  const auto reg = InterpolatingRegression::default_instance();
  const Vector z = theory::phi_limit(reg, InterpolatingRegression::default_start());
  CHECK(reg.loss(z) <= 1e-18);
  const auto e = linalg::sym_eigh(reg.hessian(z));
  const Index n = reg.num_samples();
  for (Index i = 0; i < n; ++i) CHECK(e.eigvals[i] > 1e-6);
  for (Index i = n; i < reg.dim(); ++i) CHECK(std::abs(e.eigvals[i]) < 1e-8);
}

TEST_CASE("softmax probabilities and label sampling") {
  const auto model = SoftmaxModel::default_instance();
  CHECK(model.dim() == 67);
  const Vector theta = model.initial_point(0);
  for (Index b = 0; b < model.num_samples(); ++b) {
    const Vector pr = model.probabilities(b, theta);
    CHECK(pr.sum() == doctest::Approx(1.0));
    CHECK(pr.minCoeff() > 0.0);
  }
  CounterRng a = CounterRng::stream(1, 0), b = CounterRng::stream(1, 0);
  CHECK(model.sample_labels(theta, a) == model.sample_labels(theta, b));

  // Label gradients against differences of -log p.
  const int label = 2;
  const double h = 1e-6;
  Vector fd(model.dim());
  for (Index i = 0; i < model.dim(); ++i) {
    Vector plus = theta, minus = theta;
    plus[i] += h;
    minus[i] -= h;
    fd[i] = (-std::log(model.probabilities(0, plus)[label]) + std::log(model.probabilities(0, minus)[label])) / (2 * h);
  }
  CHECK((model.label_grad(0, theta, label) - fd).norm() <= 1e-6);
}

TEST_CASE("admissible radius is configurable") {
  Toy2D toy;
  toy.set_admissible_radius(10.0);
  CHECK_THROWS_AS(toy.loss(Vector{{11.0, 0.0}}), DivergenceError);
  CHECK_NOTHROW(toy.loss(Vector{{9.0, 0.0}}));
}
