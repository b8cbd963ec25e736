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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "irelab/landscape.hpp"

namespace irelab::optim {

enum class OptimizerKind { GD, SGD, Momentum, Adam, AdamW, SamStandard, SamAverage };

std::string_view to_string(OptimizerKind kind);
/// Accepts the lower-case names used in config files ("gd", "sam_average", ...).
OptimizerKind parse_optimizer_kind(std::string_view name);

enum class ScheduleKind { Constant, StepDecay, CosineWarmup };

std::string_view to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(std::string_view name);

/// Learning rate as a pure function of the step index.
struct LrSchedule {
  ScheduleKind kind = ScheduleKind::Constant;
  double base = 0.1;
  // StepDecay: lr = base * factor^(number of milestones <= t)
  double factor = 0.1;
  std::vector<std::int64_t> milestones;
  // CosineWarmup: linear ramp over warmup_steps, then cosine from base to
  // min_lr at total_steps.
  std::int64_t warmup_steps = 0;
  std::int64_t total_steps = 0;
  double min_lr = 0.0;

  double at(std::int64_t t) const;
  void validate() const;
};

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::GD;
  LrSchedule lr;
  double momentum = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.95;
  double eps = 1e-8;
  /// Decoupled, AdamW only.
  double weight_decay = 0.0;
  /// SAM kinds only.
  double sam_rho = 0.05;
  /// Per-sample gradients averaged per step. 0 means the full-batch gradient;
  /// SGD treats 0 as 1.
  std::int64_t batch_size = 0;
  /// Clip the direction g_t to this Euclidean norm; 0 disables.
  double grad_clip = 0.0;

  /// Throws std::invalid_argument on an out-of-domain field.
  void validate() const;
  /// Gradient evaluations consumed by one call to direction() away from
  /// exact stationary points (standard SAM skips its second one there).
  int evals_per_step() const noexcept;
};

/// Per-trajectory buffers, zero-initialized at dimension p.
struct OptimizerState {
  explicit OptimizerState(Index p = 0)
      : momentum(Vector::Zero(p)), first_moment(Vector::Zero(p)), second_moment(Vector::Zero(p)) {}

  std::int64_t step = 0;
  Vector momentum;
  Vector first_moment;
  Vector second_moment;
  /// Cumulative gradient evaluations (one per mini-batch or full-batch backprop).
  std::int64_t grad_evals = 0;
};

inline constexpr double kSamZeroGradientGuard = 1e-12;

/// Mini-batch gradient: the mean of `batch` per-sample gradients with indices
/// drawn uniformly with replacement; batch == 0 gives the full gradient.
Vector stochastic_grad(const Landscape& landscape, const Vector& theta, std::int64_t batch,
                       CounterRng& rng);

/// grad L_i(theta + rho g_i/||g_i||) for a uniformly drawn i; returns g_i
/// unchanged when ||g_i|| <= 1e-12. Adds the gradient evaluations actually
/// performed (2, or 1 on the zero-gradient branch) to *evals when given.
Vector sam_standard_direction(const OptimizerConfig& cfg, const Landscape& landscape,
                              const Vector& theta, CounterRng& rng,
                              std::int64_t* evals = nullptr);

/// grad L(theta + rho xi/||xi||), xi ~ N(0, I). One gradient evaluation.
Vector sam_average_direction(const OptimizerConfig& cfg, const Landscape& landscape,
                             const Vector& theta, CounterRng& rng,
                             std::int64_t* evals = nullptr);

/// Base-optimizer direction g_t, before multiplication by the learning rate.
/// Advances the state's step counter, moment buffers and evaluation ledger.
/// Non-finite gradients surface as DivergenceError.
Vector direction(const OptimizerConfig& cfg, OptimizerState& state, const Landscape& landscape,
                 const Vector& theta, CounterRng& rng);

/// theta - lr * g.
Vector apply_step(const Vector& theta, const Vector& g, double lr);

/// AdamW decoupled decay theta <- theta - lr * weight_decay * theta; identity
/// for every other kind.
Vector apply_weight_decay(const OptimizerConfig& cfg, const Vector& theta, double lr);

/// Rescales g to norm cfg.grad_clip when clipping is enabled and exceeded.
Vector clip_direction(const OptimizerConfig& cfg, Vector g);

/// One plain optimizer step at step index t: decay, direction, update.
Vector base_step(const OptimizerConfig& cfg, OptimizerState& state, const Landscape& landscape,
                 const Vector& theta, std::int64_t t, CounterRng& rng);

}  // namespace irelab::optim
