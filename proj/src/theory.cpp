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

#include "irelab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "irelab/ire.hpp"
#include "irelab/parallel.hpp"

namespace irelab::theory {

namespace {

Vector rk4_step(const Landscape& landscape, const Vector& theta, const Vector& k1, double h) {
  const Vector k2 = -landscape.grad(theta + (0.5 * h) * k1);
  const Vector k3 = -landscape.grad(theta + (0.5 * h) * k2);
  const Vector k4 = -landscape.grad(theta + h * k3);
  return theta + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

constexpr double kMinFlowStep = 1e-300;
// The step-doubling difference cannot resolve below a few ulps of theta.
constexpr double kRoundingFloor = 64.0 * std::numeric_limits<double>::epsilon();

}  // namespace

FlowResult gradient_flow(const Landscape& landscape, const Vector& theta, const PhiConfig& cfg,
                         const std::function<bool(const Vector&)>& stop) {
  FlowResult out;
  out.theta = theta;
  double h = std::min(cfg.initial_step, cfg.max_step);
  Vector g = landscape.grad(out.theta);
  double loss = landscape.loss(out.theta);

  while (true) {
    if (g.norm() <= cfg.grad_tolerance) return out;
    if (stop && stop(out.theta)) {
      out.stopped_early = true;
      return out;
    }
    if (out.time >= cfg.max_time)
      throw NonConvergenceError("gradient flow did not reach ||grad L|| <= " +
                                std::to_string(cfg.grad_tolerance) + " within time " +
                                std::to_string(cfg.max_time));

    const Vector k1 = -g;
    const Vector full = rk4_step(landscape, out.theta, k1, h);
    const Vector mid = rk4_step(landscape, out.theta, k1, 0.5 * h);
    const Vector half = rk4_step(landscape, mid, -landscape.grad(mid), 0.5 * h);

    const double err = (full - half).norm();
    const double floor = std::max(cfg.abs_tolerance, kRoundingFloor * (1.0 + out.theta.norm()));
    const double tol = floor + cfg.rel_tolerance * (half - out.theta).norm();
    const double new_loss = landscape.loss(half);
    // Loss evaluated near a minimum carries rounding noise of order
    // eps * sqrt(L); increases below that are not treated as overshoot.
    const bool descends = new_loss <= loss + 1e-6 * loss + 1e-15 * std::sqrt(loss);

    if (err <= tol && descends) {
      out.theta = half;
      out.time += h;
      ++out.steps;
      loss = new_loss;
      g = landscape.grad(out.theta);
      const double grow = err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 4.0;
      h = std::min(h * std::clamp(grow, 1.0, 4.0), cfg.max_step);
    } else {
      const double shrink = err > tol ? std::clamp(0.9 * std::pow(tol / err, 0.2), 0.1, 0.5) : 0.5;
      h *= shrink;
      if (h < kMinFlowStep) throw NonConvergenceError("gradient flow step size underflow");
    }
  }
}

Vector phi_limit(const Landscape& landscape, const Vector& theta, const PhiConfig& cfg) {
  return gradient_flow(landscape, theta, cfg).theta;
}

double dist_to_manifold(const Landscape& landscape, const Vector& theta, const PhiConfig& cfg) {
  return (theta - phi_limit(landscape, theta, cfg)).norm();
}

double trace_hessian(const Landscape& landscape, const Vector& theta) {
  return landscape.diag_hessian(theta).sum();
}

Vector trace_hessian_grad_fd(const Landscape& landscape, const Vector& theta, double step) {
  Vector out(theta.size());
  Vector probe = theta;
  for (Index k = 0; k < theta.size(); ++k) {
    probe[k] = theta[k] + step;
    const double plus = trace_hessian(landscape, probe);
    probe[k] = theta[k] - step;
    const double minus = trace_hessian(landscape, probe);
    probe[k] = theta[k];
    out[k] = (plus - minus) / (2.0 * step);
  }
  return out;
}

Index resolve_sharp_dim(const Landscape& landscape, Index m) {
  const Index resolved = m > 0 ? m : landscape.sharp_dim();
  if (resolved < 1 || resolved >= landscape.dim())
    throw std::invalid_argument("sharp dimension must satisfy 1 <= m < p (got " +
                                std::to_string(resolved) + ")");
  return resolved;
}

RiemannianGrad riemannian_trace_grad(const Landscape& landscape, const Vector& z, Index m) {
  const Index sharp = resolve_sharp_dim(landscape, m);
  const auto analytic = landscape.manifold_trace_grad(z);
  const Vector tg = analytic ? *analytic : trace_hessian_grad_fd(landscape, z);
  const linalg::Projector proj = ire::flat_projector(landscape, z, sharp);
  return {0.5 * proj.apply(tg), proj.degenerate_cut};
}

// ---------------------------------------------------------------------------

std::string_view to_string(SamVariant v) {
  return v == SamVariant::Average ? "average" : "standard";
}

SamVariant parse_sam_variant(std::string_view name) {
  if (name == "average") return SamVariant::Average;
  if (name == "standard") return SamVariant::Standard;
  throw std::invalid_argument("unknown SAM variant '" + std::string(name) +
                              "' (expected average, standard)");
}

double TwoPhaseConfig::hitting_threshold() const {
  const double scale = variant == SamVariant::Average ? std::sqrt(lr) : std::pow(lr, 1.0 - alpha);
  return hitting_constant * scale * rho;
}

void TwoPhaseConfig::validate() const {
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be positive");
  if (!(kappa >= 0.0)) throw std::invalid_argument("kappa must be >= 0");
  if (steps < 0) throw std::invalid_argument("steps must be >= 0");
  if (!(hitting_constant > 0.0)) throw std::invalid_argument("hitting constant must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");
}

PhaseOneResult run_phase_one(const Landscape& landscape, const Vector& theta0,
                             const TwoPhaseConfig& cfg) {
  PhaseOneResult out;
  out.threshold = cfg.hitting_threshold();
  out.limit = phi_limit(landscape, theta0, cfg.phi);
  const FlowResult flow = gradient_flow(landscape, theta0, cfg.phi, [&](const Vector& theta) {
    return (theta - out.limit).norm() <= out.threshold;
  });
  out.theta = flow.theta;
  out.time = flow.time;
  out.distance = (out.theta - out.limit).norm();
  return out;
}

Vector sam_ire_step(const Landscape& landscape, const Vector& theta, const TwoPhaseConfig& cfg,
                    Index m, CounterRng& rng, std::int64_t* grad_evals) {
  optim::OptimizerConfig sam;
  sam.sam_rho = cfg.rho;
  const Vector g = cfg.variant == SamVariant::Average
                       ? optim::sam_average_direction(sam, landscape, theta, rng, grad_evals)
                       : optim::sam_standard_direction(sam, landscape, theta, rng, grad_evals);
  const auto boosted = ire::exact_projection_direction(landscape, theta, m, g, cfg.kappa);
  return theta - cfg.lr * boosted.direction;
}

TwoPhaseResult two_phase_run(const Landscape& landscape, const Vector& theta0,
                             const TwoPhaseConfig& cfg) {
  cfg.validate();
  const Index m = resolve_sharp_dim(landscape, cfg.sharp_dim);
  TwoPhaseResult out;
  out.phase_one = run_phase_one(landscape, theta0, cfg);
  out.theta = out.phase_one.theta;

  CounterRng rng = CounterRng::stream(cfg.seed, 0);
  for (std::int64_t t = 0; t < cfg.steps; ++t) {
    try {
      out.theta = sam_ire_step(landscape, out.theta, cfg, m, rng, &out.grad_evals);
      TwoPhaseRow row;
      row.step = t + 1;
      row.loss = landscape.loss(out.theta);
      if (cfg.track_manifold) {
        row.limit = phi_limit(landscape, out.theta, cfg.phi);
        row.dist = (out.theta - row.limit).norm();
        row.trace = trace_hessian(landscape, row.limit);
      }
      out.rows.push_back(std::move(row));
    } catch (const DivergenceError& e) {
      out.diverged = true;
      out.message = e.what();
      break;
    } catch (const NonConvergenceError& e) {
      out.diverged = true;
      out.message = e.what();
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

DriftReport measure_drift(const Landscape& landscape, const Vector& theta0, const DriftConfig& cfg) {
  cfg.base.validate();
  if (cfg.repetitions < 2) throw std::invalid_argument("drift needs at least 2 repetitions");
  const Index m = resolve_sharp_dim(landscape, cfg.base.sharp_dim);
  const PhaseOneResult start = run_phase_one(landscape, theta0, cfg.base);
  if (landscape.loss(start.limit) > 1e-12)
    throw std::invalid_argument("drift start point is not on the manifold: loss(z0) = " +
                                std::to_string(landscape.loss(start.limit)));

  DriftReport report;
  report.start = start.theta;
  report.z0 = start.limit;
  report.riemannian_grad = riemannian_trace_grad(landscape, start.limit, m).value;

  const auto kappas = static_cast<std::int64_t>(cfg.kappas.size());
  const std::int64_t reps = cfg.repetitions;
  std::vector<Vector> drifts(static_cast<std::size_t>(kappas * reps));
  parallel_for(kappas * reps, cfg.jobs, [&](std::int64_t job) {
    const std::int64_t k = job / reps, r = job % reps;
    TwoPhaseConfig step_cfg = cfg.base;
    step_cfg.kappa = cfg.kappas[static_cast<std::size_t>(k)];
    CounterRng rng = CounterRng::stream(cfg.base.seed, static_cast<std::uint64_t>(r));
    const Vector next = sam_ire_step(landscape, start.theta, step_cfg, m, rng);
    drifts[static_cast<std::size_t>(job)] = phi_limit(landscape, next, cfg.base.phi) - start.limit;
  });

  const double p = static_cast<double>(landscape.dim());
  const double lr_eff = cfg.base.variant == SamVariant::Average
                            ? cfg.base.lr * cfg.base.rho * cfg.base.rho / p
                            : cfg.base.lr * cfg.base.rho * cfg.base.rho;
  const Vector target = -report.riemannian_grad;
  for (std::int64_t k = 0; k < kappas; ++k) {
    DriftEstimate est;
    est.kappa = cfg.kappas[static_cast<std::size_t>(k)];
    est.mean = Vector::Zero(landscape.dim());
    for (std::int64_t r = 0; r < reps; ++r) est.mean += drifts[static_cast<std::size_t>(k * reps + r)];
    est.mean /= static_cast<double>(reps);
    Vector var = Vector::Zero(landscape.dim());
    for (std::int64_t r = 0; r < reps; ++r) {
      const Vector d = drifts[static_cast<std::size_t>(k * reps + r)] - est.mean;
      var += d.cwiseProduct(d);
    }
    var /= static_cast<double>(reps - 1);
    est.standard_error = (var / static_cast<double>(reps)).cwiseSqrt();
    est.magnitude = est.mean.norm();
    const double denom = est.magnitude * target.norm();
    est.cosine = denom > 0.0 ? est.mean.dot(target) / denom : 0.0;
    est.predicted = (1.0 + est.kappa) * lr_eff * target;
    report.estimates.push_back(std::move(est));
  }
  return report;
}

double origin_fit_r2(const std::vector<double>& kappas, const std::vector<double>& magnitudes) {
  if (kappas.size() != magnitudes.size() || kappas.size() < 2)
    throw std::invalid_argument("origin_fit_r2: need matching inputs with at least 2 points");
  double sxy = 0.0, sxx = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    const double x = 1.0 + kappas[i];
    sxy += x * magnitudes[i];
    sxx += x * x;
    mean += magnitudes[i];
  }
  mean /= static_cast<double>(magnitudes.size());
  const double slope = sxy / sxx;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    const double r = magnitudes[i] - slope * (1.0 + kappas[i]);
    ss_res += r * r;
    ss_tot += (magnitudes[i] - mean) * (magnitudes[i] - mean);
  }
  return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
}

// ---------------------------------------------------------------------------

void SdeConfig::validate() const {
  if (!h || !dh) throw std::invalid_argument("SDE needs h and its derivative");
  if (!(lr > 0.0)) throw std::invalid_argument("SDE lr must be positive");
  if (!(sigma >= 0.0)) throw std::invalid_argument("SDE sigma must be >= 0");
  if (!(kappa >= 0.0)) throw std::invalid_argument("SDE kappa must be >= 0");
  if (!(step() > 0.0) || step() > lr / 10.0)
    throw std::invalid_argument("SDE step must satisfy 0 < dt <= lr / 10");
  if (!(horizon > 0.0)) throw std::invalid_argument("SDE horizon must be positive");
  if (record_every < 1) throw std::invalid_argument("SDE record_every must be >= 1");
}

SdePath sde_simulate(const SdeConfig& cfg, CounterRng& rng) {
  cfg.validate();
  const double dt = cfg.step();
  const auto n = static_cast<std::int64_t>(std::ceil(cfg.horizon / dt - 1e-9));
  const double noise = std::sqrt(cfg.lr * cfg.sigma * cfg.sigma * dt);

  SdePath path;
  path.dt = dt;
  path.sigma = cfg.sigma;
  path.lr = cfg.lr;
  path.kappa = cfg.kappa;
  const auto keep = static_cast<std::size_t>(n / cfg.record_every + 2);
  path.time.reserve(keep);
  path.u.reserve(keep);
  path.v.reserve(keep);

  double u = cfg.u0, v = cfg.v0;
  auto record = [&](std::int64_t k) {
    path.time.push_back(static_cast<double>(k) * dt);
    path.u.push_back(u);
    path.v.push_back(v);
  };
  record(0);
  for (std::int64_t k = 1; k <= n; ++k) {
    const double hu = cfg.h(u);
    if (!(hu > 0.0)) throw std::invalid_argument("SDE h(u) must stay positive");
    const double du = -(1.0 + cfg.kappa) * v * v * cfg.dh(u) / 2.0 * dt;
    const double dv = -v * hu * dt + noise * std::sqrt(hu) * rng.normal();
    u += du;
    v += dv;
    if (!std::isfinite(u) || !std::isfinite(v) || std::abs(u) > cfg.escape_radius ||
        std::abs(v) > cfg.escape_radius)
      throw DivergenceError("SDE path escaped at t = " + std::to_string(static_cast<double>(k) * dt));
    if (k % cfg.record_every == 0 || k == n) record(k);
  }
  return path;
}

// ---------------------------------------------------------------------------

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::nan("");
  const double denom = n * sxx - sx * sx;
  return denom != 0.0 ? (n * sxy - sx * sy) / denom : std::nan("");
}

LemmaReport lemma_property_suite(const Landscape& landscape, const Vector& z, const LemmaConfig& cfg) {
  if (landscape.loss(z) > 1e-12) throw std::invalid_argument("lemma suite: z is not on the manifold");
  const Index p = landscape.dim();
  const Index m = resolve_sharp_dim(landscape, cfg.sharp_dim);
  const linalg::Projector pz = ire::flat_projector(landscape, z, m);

  LemmaReport report;
  for (int d = 0; d < cfg.directions; ++d) {
    CounterRng rng = CounterRng::stream(cfg.seed, static_cast<std::uint64_t>(d));
    Vector w = rng.normal_vector(p);
    w.normalize();
    for (double delta : cfg.deltas) {
      LemmaSample s;
      s.delta = delta;
      s.direction = d;
      const Vector theta = z + delta * w;
      const Vector phi = phi_limit(landscape, theta, cfg.phi);
      const auto eig = linalg::sym_eigh(landscape.hessian(theta));
      const linalg::Projector pt = linalg::spectral_projector(eig, m + 1, p);
      const Vector g = landscape.grad(theta);
      s.dist = (theta - phi).norm();
      s.loss = landscape.loss(theta);
      s.grad_norm = g.norm();
      s.projector_gap = (pt.matrix - pz.matrix).norm();
      s.projected_grad = pt.apply(g).norm();
      s.tangency_remainder = (phi - z - pz.apply(theta - z)).norm();
      s.lambda_m = eig.eigvals[m - 1];
      s.lambda_max = eig.eigvals[0];
      report.samples.push_back(s);
    }
  }

  std::vector<double> deltas, gaps, projected, remainders;
  report.nu = std::numeric_limits<double>::infinity();
  report.beta_hessian = 0.0;
  for (const auto& s : report.samples) {
    deltas.push_back(s.delta);
    gaps.push_back(s.projector_gap);
    projected.push_back(s.projected_grad);
    remainders.push_back(s.tangency_remainder);
    report.nu = std::min(report.nu, s.lambda_m);
    report.beta_hessian = std::max(report.beta_hessian, std::abs(s.lambda_max));
  }
  report.projector_exponent = loglog_slope(deltas, gaps);
  report.projected_grad_exponent = loglog_slope(deltas, projected);
  report.tangency_exponent = loglog_slope(deltas, remainders);

  report.mu = std::min(report.nu, 1.0 / report.beta_hessian);
  report.beta = std::max(report.beta_hessian, 1.0 / report.mu);
  const double mu = report.mu, beta = report.beta;
  for (const auto& s : report.samples) {
    const double d = s.dist, gn = s.grad_norm, l = s.loss;
    auto check = [&](bool ok, const char* what) {
      if (ok) return;
      std::ostringstream msg;
      msg << what << " fails at delta=" << s.delta << " direction=" << s.direction
          << " (dist=" << d << ", grad=" << gn << ", loss=" << l << ")";
      report.violations.push_back(msg.str());
    };
    check(mu * gn <= d, "mu ||grad L|| <= dist");
    check(d <= beta * gn, "dist <= beta ||grad L||");
    check(2.0 * mu * l <= gn * gn, "2 mu L <= ||grad L||^2");
    check(gn * gn <= 2.0 * beta * beta * l / mu, "||grad L||^2 <= 2 beta^2 L / mu");
    check(mu * d * d / 2.0 <= l, "mu dist^2 / 2 <= L");
    check(l <= beta * beta * d * d / (2.0 * mu), "L <= beta^2 dist^2 / (2 mu)");
  }
  return report;
}

}  // namespace irelab::theory
