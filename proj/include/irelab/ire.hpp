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

// Implicit regularization enhancement: boost the component of a base
// optimizer's direction that lies along flat directions of the landscape,
//
//   theta_{t+1} = theta_t - lr_t * (g_t + kappa * P_t g_t),
//
// where P_t is either a coordinate mask over the flattest fraction gamma of a
// diagonal Hessian estimate (refreshed every K steps) or the exact spectral
// projector onto the bottom p - m Hessian eigenvectors.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "irelab/landscape.hpp"
#include "irelab/linalg.hpp"
#include "irelab/optim.hpp"

namespace irelab::ire {

enum class Estimator { Fisher, ExactDiag, ExactSpectral };

std::string_view to_string(Estimator e);
Estimator parse_estimator(std::string_view name);

struct IreConfig {
  double kappa = 1.0;
  /// Fraction of coordinates treated as flat; the mask keeps floor(p * gamma).
  double gamma = 0.8;
  /// Mask refresh interval K, in steps.
  std::int64_t refresh_period = 10;
  /// Activation: the first step t with t >= warmup_steps or loss <= warmup_loss,
  /// whichever comes first. Neither set means active from t = 0.
  std::optional<std::int64_t> warmup_steps;
  std::optional<double> warmup_loss;
  Estimator estimator = Estimator::Fisher;
  /// Sharp dimension m for ExactSpectral; 0 uses the landscape's declaration.
  Index sharp_dim = 0;

  void validate() const;
  /// Non-fatal remarks about the configuration (e.g. gamma below 0.5).
  std::vector<std::string> warnings() const;
};

struct DiagHessianEstimate {
  Vector h;
  Estimator source = Estimator::ExactDiag;
  std::int64_t step = 0;
};

struct FlatMask {
  std::vector<bool> selected;
  Index count = 0;
  /// The floor(p * gamma)-th smallest |h|.
  double threshold = 0.0;

  Index size() const noexcept { return static_cast<Index>(selected.size()); }
  /// n .* g
  Vector apply(const Vector& g) const;
  Vector as_vector() const;
};

/// h = B * g .* g with g the sampled-label gradient. One gradient evaluation.
DiagHessianEstimate estimate_diag_fisher(const Landscape& landscape, const Vector& theta,
                                         CounterRng& rng, std::int64_t step = 0);

/// Exact diagonal of the Hessian (finite differences when not analytic).
DiagHessianEstimate estimate_diag_exact(const Landscape& landscape, const Vector& theta,
                                        std::int64_t step = 0);

/// floor(p * gamma) (with a 1e-9 guard against representation error in gamma).
Index flat_count(Index p, double gamma);

/// Selects the flat_count(p, gamma) coordinates with the smallest |h|, lowest
/// index first among ties. std::invalid_argument when the count is 0 or
/// gamma is outside (0, 1).
FlatMask build_mask(const Vector& h, double gamma);
inline FlatMask build_mask(const DiagHessianEstimate& h, double gamma) { return build_mask(h.h, gamma); }

struct SpectralBoost {
  Vector direction;
  bool degenerate_cut = false;
};

/// g + kappa * P_{m+1:p}(hessian(theta)) g.
SpectralBoost exact_projection_direction(const Landscape& landscape, const Vector& theta, Index m,
                                         const Vector& g, double kappa);

/// Flat projector P_{m+1:p}(hessian(theta)).
linalg::Projector flat_projector(const Landscape& landscape, const Vector& theta, Index m);

/// Per-trajectory IRE state: the base optimizer's buffers plus the cached
/// mask or projector. The Fisher estimator draws labels from its own stream,
/// so the base optimizer's random draws are the same with or without IRE.
struct IreState {
  IreState(Index p, std::uint64_t estimator_seed);

  optim::OptimizerState base;
  CounterRng estimator_rng;
  std::optional<std::int64_t> activated_at;
  std::optional<FlatMask> mask;
  std::optional<linalg::Projector> projector;
  std::int64_t refreshes = 0;
  /// Gradient evaluations spent on Fisher estimates.
  std::int64_t estimator_evals = 0;
  bool degenerate_cut_seen = false;

  std::int64_t total_grad_evals() const noexcept { return base.grad_evals + estimator_evals; }
};

/// One step of the IRE-wrapped optimizer at step index t. Before activation
/// this is exactly optim::base_step. Mutates state (buffers, mask cache).
Vector ire_step(const IreConfig& cfg, const optim::OptimizerConfig& base, IreState& state,
                const Landscape& landscape, const Vector& theta, std::int64_t t, CounterRng& rng);

}  // namespace irelab::ire
