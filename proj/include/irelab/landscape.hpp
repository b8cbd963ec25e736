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

#include <optional>
#include <string>

#include "irelab/linalg.hpp"
#include "irelab/rng.hpp"
#include "irelab/types.hpp"

namespace irelab {

struct Capabilities {
  bool exact_hessian = false;
  bool exact_diag_hessian = false;
  bool sampled_label_gradient = false;
  /// The set of global minimizers is known in closed form.
  bool analytic_manifold = false;
  /// Global minimum is zero and attained on a manifold (Phi and distances make sense).
  bool zero_loss_minima = false;
};

inline constexpr double kDefaultAdmissibleRadius = 1e6;
inline constexpr double kHessianFiniteDifferenceStep = 1e-5;
inline constexpr double kDiagFiniteDifferenceStep = 1e-4;

/// Objective L(theta) = (1/n) sum_i L_i(theta).
///
/// Public evaluation methods validate their input and then dispatch to the
/// protected do_* hooks. Sample indices are 0-based. All evaluations are const
/// and pure, so a landscape can be shared between threads.
///
/// Errors: a theta of the wrong length is std::invalid_argument; non-finite
/// entries or ||theta|| beyond admissible_radius() raise DivergenceError.
class Landscape {
 public:
  virtual ~Landscape() = default;

  virtual std::string name() const = 0;
  virtual Index dim() const = 0;
  virtual Index num_samples() const { return 1; }
  virtual Capabilities capabilities() const = 0;
  /// Rank m of the Hessian on the minima manifold, 0 when not declared.
  virtual Index sharp_dim() const { return 0; }

  double admissible_radius() const noexcept { return radius_; }
  void set_admissible_radius(double radius);

  double loss(const Vector& theta) const;
  Vector grad(const Vector& theta) const;
  double sample_loss(Index i, const Vector& theta) const;
  Vector sample_grad(Index i, const Vector& theta) const;
  /// Exact when capabilities().exact_hessian, otherwise central differences
  /// of grad with step 1e-5.
  linalg::SymMatrix hessian(const Vector& theta) const;
  /// diag of the Hessian. Exact when available, otherwise central second
  /// differences of the loss with step 1e-4.
  Vector diag_hessian(const Vector& theta) const;
  /// (1/B) sum_b grad l(f(x_b); y_b) with y_b drawn from the model's softmax.
  /// std::logic_error unless capabilities().sampled_label_gradient.
  Vector sampled_label_grad(const Vector& theta, CounterRng& rng) const;
  /// Gradient of Tr(hessian) at a point on the minima manifold, when the
  /// landscape knows it analytically.
  virtual std::optional<Vector> manifold_trace_grad(const Vector& z) const;

  /// Throws if theta cannot be evaluated (see class comment).
  void check_point(const Vector& theta) const;

 protected:
  virtual double do_loss(const Vector& theta) const = 0;
  virtual Vector do_grad(const Vector& theta) const = 0;
  virtual double do_sample_loss(Index i, const Vector& theta) const;
  virtual Vector do_sample_grad(Index i, const Vector& theta) const;
  virtual Matrix do_hessian(const Vector& theta) const;
  virtual Vector do_diag_hessian(const Vector& theta) const;
  virtual Vector do_sampled_label_grad(const Vector& theta, CounterRng& rng) const;

  Matrix finite_difference_hessian(const Vector& theta) const;

 private:
  void check_sample(Index i) const;
  double radius_ = kDefaultAdmissibleRadius;
};

/// L(u, v) = (1 + u^2) v^2 / 2. Minima manifold {v = 0}.
class Toy2D final : public Landscape {
 public:
  std::string name() const override { return "toy2d"; }
  Index dim() const override { return 2; }
  Capabilities capabilities() const override;
  Index sharp_dim() const override { return 1; }
  std::optional<Vector> manifold_trace_grad(const Vector& z) const override;

 protected:
  double do_loss(const Vector& theta) const override;
  Vector do_grad(const Vector& theta) const override;
  Matrix do_hessian(const Vector& theta) const override;
};

}  // namespace irelab
