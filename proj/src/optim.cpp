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

#include "irelab/optim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

namespace irelab::optim {

namespace {

constexpr std::array<std::pair<OptimizerKind, std::string_view>, 7> kKindNames{{
    {OptimizerKind::GD, "gd"},
    {OptimizerKind::SGD, "sgd"},
    {OptimizerKind::Momentum, "momentum"},
    {OptimizerKind::Adam, "adam"},
    {OptimizerKind::AdamW, "adamw"},
    {OptimizerKind::SamStandard, "sam_standard"},
    {OptimizerKind::SamAverage, "sam_average"},
}};

constexpr std::array<std::pair<ScheduleKind, std::string_view>, 3> kScheduleNames{{
    {ScheduleKind::Constant, "constant"},
    {ScheduleKind::StepDecay, "step"},
    {ScheduleKind::CosineWarmup, "cosine"},
}};

bool is_sam(OptimizerKind kind) {
  return kind == OptimizerKind::SamStandard || kind == OptimizerKind::SamAverage;
}

}  // namespace

std::string_view to_string(OptimizerKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

OptimizerKind parse_optimizer_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  throw std::invalid_argument("unknown optimizer kind '" + std::string(name) +
                              "' (expected gd, sgd, momentum, adam, adamw, sam_standard, "
                              "sam_average)");
}

std::string_view to_string(ScheduleKind kind) {
  for (const auto& [k, name] : kScheduleNames)
    if (k == kind) return name;
  return "unknown";
}

ScheduleKind parse_schedule_kind(std::string_view name) {
  for (const auto& [k, n] : kScheduleNames)
    if (n == name) return k;
  throw std::invalid_argument("unknown schedule '" + std::string(name) +
                              "' (expected constant, step, cosine)");
}

double LrSchedule::at(std::int64_t t) const {
  switch (kind) {
    case ScheduleKind::Constant:
      return base;
    case ScheduleKind::StepDecay: {
      const auto passed = std::count_if(milestones.begin(), milestones.end(),
                                        [t](std::int64_t m) { return m <= t; });
      return base * std::pow(factor, static_cast<double>(passed));
    }
    case ScheduleKind::CosineWarmup: {
      if (t < warmup_steps)
        return base * static_cast<double>(t + 1) / static_cast<double>(warmup_steps);
      const double span = static_cast<double>(std::max<std::int64_t>(1, total_steps - warmup_steps));
      const double progress = std::clamp(static_cast<double>(t - warmup_steps) / span, 0.0, 1.0);
      return min_lr + (base - min_lr) * 0.5 * (1.0 + std::cos(M_PI * progress));
    }
  }
  return base;
}

void LrSchedule::validate() const {
  if (!(base > 0.0) || !std::isfinite(base))
    throw std::invalid_argument("learning rate must be positive");
  if (kind == ScheduleKind::StepDecay) {
    if (!(factor > 0.0)) throw std::invalid_argument("step decay factor must be positive");
    if (!std::is_sorted(milestones.begin(), milestones.end()))
      throw std::invalid_argument("step decay milestones must be sorted");
  }
  if (kind == ScheduleKind::CosineWarmup) {
    if (warmup_steps < 0 || total_steps <= warmup_steps)
      throw std::invalid_argument("cosine schedule needs 0 <= warmup_steps < total_steps");
    if (min_lr < 0.0 || min_lr > base)
      throw std::invalid_argument("cosine schedule needs 0 <= min_lr <= lr");
  }
}

void OptimizerConfig::validate() const {
  lr.validate();
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must be in [0, 1)");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw std::invalid_argument("beta1 must be in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw std::invalid_argument("beta2 must be in [0, 1)");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("weight_decay must be >= 0");
  if (is_sam(kind) && !(sam_rho > 0.0)) throw std::invalid_argument("SAM rho must be positive");
  if (batch_size < 0) throw std::invalid_argument("batch_size must be >= 0");
  if (!(grad_clip >= 0.0)) throw std::invalid_argument("grad_clip must be >= 0");
}

int OptimizerConfig::evals_per_step() const noexcept {
  return kind == OptimizerKind::SamStandard ? 2 : 1;
}

Vector stochastic_grad(const Landscape& landscape, const Vector& theta, std::int64_t batch,
                       CounterRng& rng) {
  if (batch <= 0) return landscape.grad(theta);
  const auto n = static_cast<std::uint64_t>(landscape.num_samples());
  Vector g = Vector::Zero(theta.size());
  for (std::int64_t k = 0; k < batch; ++k)
    g += landscape.sample_grad(static_cast<Index>(rng.below(n)), theta);
  return g / static_cast<double>(batch);
}

Vector sam_standard_direction(const OptimizerConfig& cfg, const Landscape& landscape,
                              const Vector& theta, CounterRng& rng, std::int64_t* evals) {
  const auto i = static_cast<Index>(rng.below(static_cast<std::uint64_t>(landscape.num_samples())));
  Vector ascent = landscape.sample_grad(i, theta);
  if (evals) ++*evals;
  const double norm = ascent.norm();
  if (norm <= kSamZeroGradientGuard) return ascent;
  Vector g = landscape.sample_grad(i, theta + (cfg.sam_rho / norm) * ascent);
  if (evals) ++*evals;
  return g;
}

Vector sam_average_direction(const OptimizerConfig& cfg, const Landscape& landscape,
                             const Vector& theta, CounterRng& rng, std::int64_t* evals) {
  const Vector xi = rng.normal_vector(theta.size());
  Vector g = landscape.grad(theta + (cfg.sam_rho / xi.norm()) * xi);
  if (evals) ++*evals;
  return g;
}

Vector direction(const OptimizerConfig& cfg, OptimizerState& state, const Landscape& landscape,
                 const Vector& theta, CounterRng& rng) {
  if (state.momentum.size() != theta.size())
    throw std::invalid_argument("optimizer state dimension does not match parameters");

  Vector g;
  switch (cfg.kind) {
    case OptimizerKind::GD:
      g = landscape.grad(theta);
      ++state.grad_evals;
      break;
    case OptimizerKind::SGD:
      g = stochastic_grad(landscape, theta, std::max<std::int64_t>(1, cfg.batch_size), rng);
      ++state.grad_evals;
      break;
    case OptimizerKind::Momentum:
      state.momentum = cfg.momentum * state.momentum + stochastic_grad(landscape, theta, cfg.batch_size, rng);
      ++state.grad_evals;
      g = state.momentum;
      break;
    case OptimizerKind::Adam:
    case OptimizerKind::AdamW: {
      const Vector raw = stochastic_grad(landscape, theta, cfg.batch_size, rng);
      ++state.grad_evals;
      const double t = static_cast<double>(state.step + 1);
      state.first_moment = cfg.beta1 * state.first_moment + (1.0 - cfg.beta1) * raw;
      state.second_moment =
          cfg.beta2 * state.second_moment + (1.0 - cfg.beta2) * raw.cwiseProduct(raw);
      const Vector m_hat = state.first_moment / (1.0 - std::pow(cfg.beta1, t));
      const Vector v_hat = state.second_moment / (1.0 - std::pow(cfg.beta2, t));
      g = m_hat.array() / (v_hat.array().sqrt() + cfg.eps);
      break;
    }
    case OptimizerKind::SamStandard:
      g = sam_standard_direction(cfg, landscape, theta, rng, &state.grad_evals);
      break;
    case OptimizerKind::SamAverage:
      g = sam_average_direction(cfg, landscape, theta, rng, &state.grad_evals);
      break;
  }
  if (!g.allFinite()) throw DivergenceError("optimizer direction is not finite");
  ++state.step;
  return g;
}

Vector apply_step(const Vector& theta, const Vector& g, double lr) {
  if (theta.size() != g.size()) throw std::invalid_argument("apply_step: dimension mismatch");
  return theta - lr * g;
}

Vector apply_weight_decay(const OptimizerConfig& cfg, const Vector& theta, double lr) {
  if (cfg.kind != OptimizerKind::AdamW || cfg.weight_decay == 0.0) return theta;
  return theta - (lr * cfg.weight_decay) * theta;
}

Vector clip_direction(const OptimizerConfig& cfg, Vector g) {
  if (cfg.grad_clip > 0.0) {
    const double norm = g.norm();
    if (norm > cfg.grad_clip) g *= cfg.grad_clip / norm;
  }
  return g;
}

Vector base_step(const OptimizerConfig& cfg, OptimizerState& state, const Landscape& landscape,
                 const Vector& theta, std::int64_t t, CounterRng& rng) {
  const double lr = cfg.lr.at(t);
  const Vector g = clip_direction(cfg, direction(cfg, state, landscape, theta, rng));
  return apply_step(apply_weight_decay(cfg, theta, lr), g, lr);
}

}  // namespace irelab::optim
