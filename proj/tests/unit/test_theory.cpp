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
#include <vector>

#include "doctest.h"
#include "irelab/landscapes.hpp"
#include "irelab/linalg.hpp"
#include "irelab/theory.hpp"

using namespace irelab;
using namespace irelab::theory;

namespace {

// Explicit Euler for the toy gradient flow du = -u v^2, dv = -(1 + u^2) v.
Vector toy_flow_euler(Vector x, double step, double horizon) {
  for (double t = 0.0; t < horizon; t += step) {
    const double u = x[0], v = x[1];
    x[0] = u - step * u * v * v;
    x[1] = v - step * (1.0 + u * u) * v;
  }
  return x;
}

PhiConfig tight() {
  PhiConfig c;
  c.grad_tolerance = 1e-13;
  c.rel_tolerance = 1e-10;
  return c;
}

}  // namespace

TEST_CASE("toy limit map agrees with a fine Euler integration") {
  const Toy2D toy;
  for (const Vector& start : {Vector{{2.0, 1.0}}, Vector{{0.5, -0.8}}, Vector{{-1.0, 0.3}}}) {
    const Vector oracle = toy_flow_euler(start, 1e-5, 40.0);
    const Vector z = phi_limit(toy, start);
    CHECK(std::abs(z[0] - oracle[0]) <= 1e-4);
    CHECK(std::abs(z[1]) <= 1e-9);
  }
}

TEST_CASE("constant valley: the flow keeps u fixed") {
  const auto valley = QuadraticValley::constant(6, Vector{{1.0, 4.0}});
  Vector theta(6);
  theta << 0.3, -0.2, 0.1, 0.5, 0.7, -0.4;
  const Vector z = phi_limit(valley, theta);
  CHECK((z.head(4) - theta.head(4)).norm() <= 1e-12);
  CHECK(z.tail(2).norm() <= 1e-10);
}

TEST_CASE("limit map is idempotent and the flow decreases the loss") {
  const auto valley = QuadraticValley::default_instance();
  const Vector z = phi_limit(valley, QuadraticValley::default_start());
  CHECK((phi_limit(valley, z) - z).norm() <= 1e-8);
  const auto reg = InterpolatingRegression::default_instance();
  const Vector zr = phi_limit(reg, InterpolatingRegression::default_start());
  CHECK((phi_limit(reg, zr) - zr).norm() <= 1e-8);

  std::vector<double> losses;
  gradient_flow(valley, QuadraticValley::default_start(), {}, [&](const Vector& th) {
    losses.push_back(valley.loss(th));
    return false;
  });
  REQUIRE(losses.size() > 2);
  for (std::size_t i = 1; i < losses.size(); ++i) CHECK(losses[i] <= losses[i - 1] * (1 + 1e-6) + 1e-15);
}

TEST_CASE("the limit map is constant along gradient directions") {
  const auto valley = QuadraticValley::default_instance();
  const Vector theta = QuadraticValley::default_start();
  const Vector g = valley.grad(theta);
  const double eps = 1e-3;
  const Vector d = (phi_limit(valley, theta - eps * g, tight()) - phi_limit(valley, theta + eps * g, tight())) / (2 * eps);
  CHECK(d.norm() <= 1e-6 * g.norm());
}

TEST_CASE("distance to the manifold") {
  const Toy2D toy;
  CHECK(dist_to_manifold(toy, Vector{{0.0, 0.3}}) == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(dist_to_manifold(toy, Vector{{1.0, 0.0}}) == 0.0);
}

TEST_CASE("flow gives up after max_time") {
  // GF on Toy2D from a point with tiny v never meets a 1e-300 gradient threshold quickly.
  const Toy2D toy;
  PhiConfig cfg;
  cfg.grad_tolerance = 1e-300;
  cfg.max_time = 5.0;
  CHECK_THROWS_AS(phi_limit(toy, Vector{{1.0, 1.0}}, cfg), NonConvergenceError);
}

TEST_CASE("Riemannian trace gradient: analytic and finite-difference paths agree") {
  const auto valley = QuadraticValley::default_instance();
  const Vector z = phi_limit(valley, QuadraticValley::default_start());
  const auto rg = riemannian_trace_grad(valley, z);
  // Tr = 6 + 3 |u|^2 on the manifold, so the tangent gradient is 0.5 * 6u.
  Vector expect = Vector::Zero(10);
  expect.head(7) = 3.0 * z.head(7);
  CHECK((rg.value - expect).norm() <= 1e-9);

  const Vector fd = trace_hessian_grad_fd(valley, z);
  const auto P = linalg::spectral_projector(linalg::sym_eigh(valley.hessian(z)), 4, 10);
  CHECK((0.5 * P.apply(fd) - rg.value).norm() <= 1e-6);
  CHECK(resolve_sharp_dim(valley, 0) == 3);
}

TEST_CASE("two-phase run reaches the hitting threshold and logs Phase II") {
  const auto valley = QuadraticValley::default_instance();
  TwoPhaseConfig cfg;
  cfg.kappa = 2.0;
  cfg.steps = 50;
  cfg.seed = 4;
  CHECK(cfg.hitting_threshold() == doctest::Approx(0.5 * 0.1 * 0.05));
  const auto r = two_phase_run(valley, QuadraticValley::default_start(), cfg);
  CHECK(r.phase_one.distance <= r.phase_one.threshold);
  CHECK(r.rows.size() == 50);
  CHECK_FALSE(r.diverged);
  CHECK(r.grad_evals == 50);
  const auto again = two_phase_run(valley, QuadraticValley::default_start(), cfg);
  CHECK(again.theta == r.theta);

  TwoPhaseConfig s = cfg;
  s.variant = SamVariant::Standard;
  CHECK(s.hitting_threshold() == doctest::Approx(0.5 * 0.1 * 0.05));
  CHECK(parse_sam_variant("standard") == SamVariant::Standard);
  CHECK_THROWS(parse_sam_variant("adaptive"));
}

TEST_CASE("average-SAM drift points down the trace gradient and scales with 1 + kappa") {
  const auto valley = QuadraticValley::default_instance();
  DriftConfig cfg;
  cfg.base.seed = 8;
  cfg.kappas = {0.0, 4.0, 9.0};
  cfg.repetitions = 100;
  const auto rep = measure_drift(valley, QuadraticValley::default_start(), cfg);
  REQUIRE(rep.estimates.size() == 3);
  std::vector<double> mags;
  for (const auto& e : rep.estimates) {
    CHECK(e.cosine >= 0.9);
    CHECK(e.magnitude == doctest::Approx(e.predicted.norm()).epsilon(0.1));
    mags.push_back(e.magnitude);
  }
  CHECK(origin_fit_r2(cfg.kappas, mags) >= 0.95);

  DriftConfig parallel = cfg;
  parallel.jobs = 3;
  const auto rep2 = measure_drift(valley, QuadraticValley::default_start(), parallel);
  for (std::size_t i = 0; i < 3; ++i) CHECK(rep2.estimates[i].mean == rep.estimates[i].mean);
}

TEST_CASE("fit helpers") {
  CHECK(origin_fit_r2({0.0, 1.0, 3.0}, {1.0, 2.0, 4.0}) == doctest::Approx(1.0));
  CHECK(origin_fit_r2({0.0, 1.0, 3.0}, {4.0, 2.0, 1.0}) < 0.5);
  CHECK(loglog_slope({1.0, 2.0, 4.0}, {3.0, 12.0, 48.0}) == doctest::Approx(2.0));
  CHECK(loglog_slope({1.0, 2.0, 4.0, 8.0}, {0.0, 2.0, 4.0, 8.0}) == doctest::Approx(1.0));
}

TEST_CASE("SDE: constant h gives an OU process with variance lr sigma^2 / 2") {
  SdeConfig cfg;
  cfg.h = [](double) { return 2.0; };
  cfg.dh = [](double) { return 0.0; };
  cfg.lr = 0.01;
  cfg.sigma = 1.5;
  cfg.horizon = 400.0;
  cfg.record_every = 10;
  CounterRng rng = CounterRng::stream(5, 0);
  const auto path = sde_simulate(cfg, rng);
  double sum = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < path.time.size(); ++k)
    if (path.time[k] >= 10.0) {
      sum += path.v[k] * path.v[k];
      ++n;
    }
  CHECK(sum / n == doctest::Approx(cfg.lr * cfg.sigma * cfg.sigma / 2.0).epsilon(0.1));
  CHECK(path.u.front() == path.u.back());
  CHECK(path.dt == doctest::Approx(0.0005));
}

TEST_CASE("SDE: u drifts toward flatter h at a rate proportional to 1 + kappa") {
  auto run = [](double kappa) {
    SdeConfig cfg;
    cfg.h = [](double u) { return 1.0 + u * u; };
    cfg.dh = [](double u) { return 2.0 * u; };
    cfg.kappa = kappa;
    cfg.horizon = 10.0;
    double drop = 0.0;
    for (int i = 0; i < 40; ++i) {
      CounterRng rng = CounterRng::stream(6, static_cast<std::uint64_t>(i));
      const auto path = sde_simulate(cfg, rng);
      drop += 1.0 - path.u.back();
    }
    return drop / 40.0;
  };
  const double d0 = run(0.0), d9 = run(9.0);
  CHECK(d0 > 0.0);
  CHECK(d9 / d0 > 7.0);
}

TEST_CASE("SDE input checks") {
  SdeConfig cfg;
  cfg.h = [](double) { return 1.0; };
  cfg.dh = [](double) { return 0.0; };
  cfg.dt = 0.002;
  CounterRng rng;
  CHECK_THROWS_AS(sde_simulate(cfg, rng), std::invalid_argument);
  cfg.dt = 0.0;
  cfg.h = [](double) { return -1.0; };
  CHECK_THROWS_AS(sde_simulate(cfg, rng), std::invalid_argument);
  cfg.h = [](double u) { return 1.0 + u * u; };
  cfg.dh = [](double) { return -1e9; };
  cfg.v0 = 1.0;
  CHECK_THROWS_AS(sde_simulate(cfg, rng), DivergenceError);
}

TEST_CASE("lemma exponents and sandwich on the valley") {
  const auto valley = QuadraticValley::default_instance();
  const Vector z = phi_limit(valley, QuadraticValley::default_start(), LemmaConfig{}.phi);
  const auto r = lemma_property_suite(valley, z);
  CHECK(r.projector_exponent == doctest::Approx(1.0).epsilon(0.2));
  CHECK(r.projected_grad_exponent == doctest::Approx(2.0).epsilon(0.1));
  CHECK(r.tangency_exponent >= 1.8);
  CHECK(r.sandwich_ok());
  CHECK(r.mu <= r.nu);
  CHECK(r.mu * r.beta >= 1.0 - 1e-12);
  CHECK(r.samples.size() == 28);
}
