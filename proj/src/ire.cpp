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

#include "irelab/ire.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace irelab::ire {

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::Fisher:
      return "fisher";
    case Estimator::ExactDiag:
      return "exact_diag";
    case Estimator::ExactSpectral:
      return "exact_spectral";
  }
  return "unknown";
}

Estimator parse_estimator(std::string_view name) {
  if (name == "fisher") return Estimator::Fisher;
  if (name == "exact_diag") return Estimator::ExactDiag;
  if (name == "exact_spectral") return Estimator::ExactSpectral;
  throw std::invalid_argument("unknown estimator '" + std::string(name) +
                              "' (expected fisher, exact_diag, exact_spectral)");
}

void IreConfig::validate() const {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be >= 0");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in (0, 1)");
  if (refresh_period < 1) throw std::invalid_argument("refresh_period must be >= 1");
  if (warmup_steps && *warmup_steps < 0) throw std::invalid_argument("warmup_steps must be >= 0");
  if (warmup_loss && !(*warmup_loss >= 0.0)) throw std::invalid_argument("warmup_loss must be >= 0");
  if (sharp_dim < 0) throw std::invalid_argument("sharp_dim must be >= 0");
}

std::vector<std::string> IreConfig::warnings() const {
  std::vector<std::string> out;
  if (gamma < 0.5)
    out.push_back("gamma = " + std::to_string(gamma) +
                  " < 0.5: more than half of the coordinates are treated as sharp");
  return out;
}

Vector FlatMask::apply(const Vector& g) const {
  if (g.size() != size()) throw std::invalid_argument("FlatMask::apply: dimension mismatch");
  Vector out = Vector::Zero(g.size());
  for (Index i = 0; i < g.size(); ++i)
    if (selected[static_cast<std::size_t>(i)]) out[i] = g[i];
  return out;
}

Vector FlatMask::as_vector() const {
  Vector out(size());
  for (Index i = 0; i < size(); ++i) out[i] = selected[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
  return out;
}

DiagHessianEstimate estimate_diag_fisher(const Landscape& landscape, const Vector& theta,
                                         CounterRng& rng, std::int64_t step) {
  const Vector g = landscape.sampled_label_grad(theta, rng);
  DiagHessianEstimate out;
  out.h = static_cast<double>(landscape.num_samples()) * g.cwiseProduct(g);
  out.source = Estimator::Fisher;
  out.step = step;
  return out;
}

DiagHessianEstimate estimate_diag_exact(const Landscape& landscape, const Vector& theta,
                                        std::int64_t step) {
  DiagHessianEstimate out;
  out.h = landscape.diag_hessian(theta);
  out.source = Estimator::ExactDiag;
  out.step = step;
  return out;
}

Index flat_count(Index p, double gamma) {
  return static_cast<Index>(std::floor(static_cast<double>(p) * gamma + 1e-9));
}

FlatMask build_mask(const Vector& h, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("build_mask: gamma must be in (0, 1)");
  const Index p = h.size();
  const Index k = flat_count(p, gamma);
  if (k < 1)
    throw std::invalid_argument("build_mask: floor(p * gamma) = 0, the mask would be empty");

  std::vector<Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(h[a]) < std::abs(h[b]); });

  FlatMask mask;
  mask.selected.assign(static_cast<std::size_t>(p), false);
  for (Index r = 0; r < k; ++r) mask.selected[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = true;
  mask.count = k;
  mask.threshold = linalg::kth_smallest_abs(h, k);
  return mask;
}

linalg::Projector flat_projector(const Landscape& landscape, const Vector& theta, Index m) {
  const Index p = landscape.dim();
  if (m < 1 || m >= p) throw std::invalid_argument("flat_projector: need 1 <= m < p");
  const auto eig = linalg::sym_eigh(landscape.hessian(theta));
  return linalg::spectral_projector(eig, m + 1, p);
}

SpectralBoost exact_projection_direction(const Landscape& landscape, const Vector& theta, Index m,
                                         const Vector& g, double kappa) {
  const linalg::Projector proj = flat_projector(landscape, theta, m);
  SpectralBoost out;
  out.direction = kappa == 0.0 ? g : Vector(g + kappa * proj.apply(g));
  out.degenerate_cut = proj.degenerate_cut;
  return out;
}

IreState::IreState(Index p, std::uint64_t estimator_seed)
    : base(p), estimator_rng(CounterRng::stream(estimator_seed, 0x1e5713a7e)) {}

namespace {

bool should_activate(const IreConfig& cfg, const Landscape& landscape, const Vector& theta,
                     std::int64_t t) {
  if (!cfg.warmup_steps && !cfg.warmup_loss) return true;
  if (cfg.warmup_steps && t >= *cfg.warmup_steps) return true;
  return cfg.warmup_loss && landscape.loss(theta) <= *cfg.warmup_loss;
}

Index resolve_sharp_dim(const IreConfig& cfg, const Landscape& landscape) {
  const Index m = cfg.sharp_dim > 0 ? cfg.sharp_dim : landscape.sharp_dim();
  if (m < 1)
    throw std::invalid_argument("exact_spectral estimator needs a sharp dimension (ire.sharp_dim)");
  return m;
}

void refresh(const IreConfig& cfg, IreState& state, const Landscape& landscape, const Vector& theta,
             std::int64_t t) {
  ++state.refreshes;
  switch (cfg.estimator) {
    case Estimator::Fisher:
      state.mask = build_mask(estimate_diag_fisher(landscape, theta, state.estimator_rng, t), cfg.gamma);
      ++state.estimator_evals;
      break;
    case Estimator::ExactDiag:
      state.mask = build_mask(estimate_diag_exact(landscape, theta, t), cfg.gamma);
      break;
    case Estimator::ExactSpectral:
      state.projector = flat_projector(landscape, theta, resolve_sharp_dim(cfg, landscape));
      state.degenerate_cut_seen = state.degenerate_cut_seen || state.projector->degenerate_cut;
      break;
  }
}

}  // namespace

Vector ire_step(const IreConfig& cfg, const optim::OptimizerConfig& base, IreState& state,
                const Landscape& landscape, const Vector& theta, std::int64_t t, CounterRng& rng) {
  const double lr = base.lr.at(t);
  const Vector g = optim::clip_direction(base, optim::direction(base, state.base, landscape, theta, rng));

  if (!state.activated_at && should_activate(cfg, landscape, theta, t)) state.activated_at = t;
  if (!state.activated_at) return optim::apply_step(optim::apply_weight_decay(base, theta, lr), g, lr);

  if ((t - *state.activated_at) % cfg.refresh_period == 0) refresh(cfg, state, landscape, theta, t);

  Vector boosted = g;
  if (cfg.kappa != 0.0) {
    if (cfg.estimator == Estimator::ExactSpectral)
      boosted += cfg.kappa * state.projector->apply(g);
    else
      boosted += cfg.kappa * state.mask->apply(g);
  }
  return optim::apply_step(optim::apply_weight_decay(base, theta, lr), boosted, lr);
}

}  // namespace irelab::ire
