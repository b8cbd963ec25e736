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

// Gradient-flow limit map, sharpness measurements, two-phase SAM-IRE runs,
// drift measurement along the minima manifold, the two-variable SDE model and
// lemma-level property checks.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "irelab/landscape.hpp"
#include "irelab/linalg.hpp"
#include "irelab/optim.hpp"

namespace irelab::theory {

// ---------------------------------------------------------------------------
// Gradient flow and the limit map

struct PhiConfig {
  double initial_step = 1e-3;
  /// Stop once ||grad L|| <= grad_tolerance.
  double grad_tolerance = 1e-10;
  double max_time = 1e6;
  /// Upper bound on the adaptive step.
  double max_step = 1.0;
  /// Local error control for step doubling: a step is accepted when the
  /// difference between one full and two half RK4 steps is at most
  /// abs_tolerance + rel_tolerance * ||displacement||.
  double rel_tolerance = 1e-7;
  double abs_tolerance = 1e-15;
};

struct FlowResult {
  Vector theta;
  double time = 0.0;
  std::int64_t steps = 0;
  /// True when stopped by the caller's predicate rather than the tolerance.
  bool stopped_early = false;
};

/// Integrates d(theta)/dt = -grad L(theta) with adaptive RK4 (step doubling,
/// plus halving whenever a step would increase the loss) until
/// ||grad L|| <= cfg.grad_tolerance or stop(theta) holds.
/// NonConvergenceError once cfg.max_time is exceeded.
FlowResult gradient_flow(const Landscape& landscape, const Vector& theta, const PhiConfig& cfg = {},
                         const std::function<bool(const Vector&)>& stop = {});

/// Phi(theta) = lim gradient flow from theta.
Vector phi_limit(const Landscape& landscape, const Vector& theta, const PhiConfig& cfg = {});

/// ||theta - Phi(theta)||.
double dist_to_manifold(const Landscape& landscape, const Vector& theta, const PhiConfig& cfg = {});

/// Sum of the exact Hessian diagonal.
double trace_hessian(const Landscape& landscape, const Vector& theta);

inline constexpr double kTraceGradStep = 1e-4;

/// Central differences of trace_hessian with step 1e-4.
Vector trace_hessian_grad_fd(const Landscape& landscape, const Vector& theta,
                             double step = kTraceGradStep);

struct RiemannianGrad {
  Vector value;
  bool degenerate_cut = false;
};

/// P_{m+1:p}(hessian(z)) grad Tr(hessian(z)) / 2 for z on the manifold, with
/// the analytic trace gradient when the landscape has one. m = 0 uses the
/// landscape's declared sharp dimension.
RiemannianGrad riemannian_trace_grad(const Landscape& landscape, const Vector& z, Index m = 0);

/// Resolves m = 0 to the landscape's declaration; invalid_argument when
/// neither gives 1 <= m < p.
Index resolve_sharp_dim(const Landscape& landscape, Index m);

// ---------------------------------------------------------------------------
// Two-phase SAM-IRE

enum class SamVariant { Average, Standard };

std::string_view to_string(SamVariant v);
SamVariant parse_sam_variant(std::string_view name);

struct TwoPhaseConfig {
  SamVariant variant = SamVariant::Average;
  double rho = 0.05;
  double lr = 0.01;
  double kappa = 0.0;
  /// Phase II steps.
  std::int64_t steps = 0;
  /// Phase I stops at dist <= c sqrt(lr) rho (average) or
  /// c lr^(1 - alpha) rho (standard).
  double hitting_constant = 0.5;
  double alpha = 0.5;
  Index sharp_dim = 0;
  std::uint64_t seed = 0;
  PhiConfig phi;
  /// Phase II rows record Phi(theta_t), dist and trace (one Phi per step).
  bool track_manifold = true;

  double hitting_threshold() const;
  void validate() const;
};

struct PhaseOneResult {
  Vector theta;
  /// Phi(theta_0), which the flow preserves.
  Vector limit;
  double time = 0.0;
  double distance = 0.0;
  double threshold = 0.0;
};

/// Gradient flow from theta0 until ||theta - Phi(theta0)|| <= threshold.
PhaseOneResult run_phase_one(const Landscape& landscape, const Vector& theta0,
                             const TwoPhaseConfig& cfg);

/// One Phase II step: theta - lr * (g + kappa P_{m+1:p}(hessian(theta)) g)
/// with g the SAM direction. Returns the new point.
Vector sam_ire_step(const Landscape& landscape, const Vector& theta, const TwoPhaseConfig& cfg,
                    Index m, CounterRng& rng, std::int64_t* grad_evals = nullptr);

struct TwoPhaseRow {
  std::int64_t step = 0;
  double loss = 0.0;
  double dist = 0.0;
  double trace = 0.0;
  Vector limit;
};

struct TwoPhaseResult {
  PhaseOneResult phase_one;
  std::vector<TwoPhaseRow> rows;
  Vector theta;
  bool diverged = false;
  std::string message;
  std::int64_t grad_evals = 0;
};

/// Phase I gradient flow, then cfg.steps of SAM-IRE with exact spectral
/// projection. Divergence in Phase II stops the run and sets `diverged`;
/// Phase I non-convergence propagates.
TwoPhaseResult two_phase_run(const Landscape& landscape, const Vector& theta0,
                             const TwoPhaseConfig& cfg);

// ---------------------------------------------------------------------------
// Drift of z_t = Phi(theta_t) along the manifold

struct DriftConfig {
  TwoPhaseConfig base;
  std::vector<double> kappas{0.0, 9.0};
  std::int64_t repetitions = 2000;
  int jobs = 1;
};

struct DriftEstimate {
  double kappa = 0.0;
  Vector mean;
  /// Coordinatewise standard error of the mean.
  Vector standard_error;
  /// cos(mean, -riemannian_trace_grad).
  double cosine = 0.0;
  double magnitude = 0.0;
  /// -(1 + kappa) lr_eff riemannian_trace_grad with lr_eff = lr rho^2 / p
  /// (average) or lr rho^2 (standard).
  Vector predicted;
};

struct DriftReport {
  Vector start;
  Vector z0;
  Vector riemannian_grad;
  std::vector<DriftEstimate> estimates;
};

/// Runs Phase I once from theta0, then for every kappa and repetition r takes
/// one Phase II step from the same start with rng stream (seed, r) (common
/// random numbers across kappa) and averages Phi(theta_1) - z0.
/// invalid_argument when loss(z0) > 1e-12.
DriftReport measure_drift(const Landscape& landscape, const Vector& theta0, const DriftConfig& cfg);

/// R^2 of the least-squares line through the origin of magnitude on (1 + kappa).
double origin_fit_r2(const std::vector<double>& kappas, const std::vector<double>& magnitudes);

// ---------------------------------------------------------------------------
// Two-variable SDE model
//
//   du = -(1 + kappa) v^2 h'(u) / 2 dt
//   dv = -v h(u) dt + sqrt(lr sigma^2 h(u)) dW

struct SdeConfig {
  std::function<double(double)> h;
  std::function<double(double)> dh;
  double sigma = 1.0;
  double lr = 0.01;
  double kappa = 0.0;
  /// 0 means lr / 20.
  double dt = 0.0;
  double horizon = 1.0;
  double u0 = 1.0;
  double v0 = 0.0;
  double escape_radius = 1e6;
  /// Keep every record_every-th grid point (the endpoint is always kept).
  std::int64_t record_every = 1;

  double step() const { return dt > 0.0 ? dt : lr / 20.0; }
  void validate() const;
};

struct SdePath {
  double dt = 0.0;
  double sigma = 0.0;
  double lr = 0.0;
  double kappa = 0.0;
  std::vector<double> time;
  std::vector<double> u;
  std::vector<double> v;
};

/// Euler-Maruyama path. DivergenceError when |u| or |v| exceeds the escape
/// radius; invalid_argument when dt > lr / 10 or h(u) <= 0 along the path.
SdePath sde_simulate(const SdeConfig& cfg, CounterRng& rng);

// ---------------------------------------------------------------------------
// Lemma property suite

struct LemmaConfig {
  std::vector<double> deltas{1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  int directions = 4;
  Index sharp_dim = 0;
  std::uint64_t seed = 0;
  PhiConfig phi{.grad_tolerance = 1e-12};
};

struct LemmaSample {
  double delta = 0.0;
  int direction = 0;
  double dist = 0.0;
  double loss = 0.0;
  double grad_norm = 0.0;
  /// ||P(theta) - P(z)||_F
  double projector_gap = 0.0;
  /// ||P(theta) grad L(theta)||
  double projected_grad = 0.0;
  /// ||Phi(theta) - z - P(z)(theta - z)||
  double tangency_remainder = 0.0;
  double lambda_m = 0.0;
  double lambda_max = 0.0;
};

struct LemmaReport {
  std::vector<LemmaSample> samples;
  double projector_exponent = 0.0;
  double projected_grad_exponent = 0.0;
  double tangency_exponent = 0.0;
  /// Smallest lambda_m and largest lambda_1 over the samples.
  double nu = 0.0;
  double beta_hessian = 0.0;
  /// Sandwich constants normalized so mu <= nu, mu <= 1/beta and beta >= 1/mu.
  double mu = 0.0;
  double beta = 0.0;
  std::vector<std::string> violations;

  bool sandwich_ok() const noexcept { return violations.empty(); }
};

/// Samples theta = z + delta w over random unit directions w, fits log-log
/// exponents of the projector gap, the projected gradient and the tangency
/// remainder, and checks the distance/gradient/loss sandwich inequalities at
/// every sample. z must be on the manifold.
LemmaReport lemma_property_suite(const Landscape& landscape, const Vector& z,
                                 const LemmaConfig& cfg = {});

/// Slope of the least-squares fit of log y on log x over pairs with x, y > 0.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace irelab::theory
