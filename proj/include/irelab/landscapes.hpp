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

#include <functional>
#include <vector>

#include "irelab/landscape.hpp"

namespace irelab {

/// Sharp-curvature profile u -> lambda(u) for QuadraticValley.
struct ValleySpectrum {
  /// R^{p-m} -> R^m, strictly positive.
  std::function<Vector(const Vector&)> lambda;
  /// m x (p-m) Jacobian of lambda.
  std::function<Matrix(const Vector&)> jacobian;
  /// Optional per-component Hessians of lambda_i, each (p-m) x (p-m). When
  /// absent the landscape Hessian falls back to finite differences.
  std::function<std::vector<Matrix>(const Vector&)> hessians;
};

/// L(u, v) = sum_i lambda_i(u) v_i^2 / 2 with theta = (u, v), u in R^{p-m},
/// v in R^m. The minima manifold is {v = 0}; the Hessian there is
/// blockdiag(0, diag(lambda(u))).
class QuadraticValley final : public Landscape {
 public:
  QuadraticValley(Index p, Index m, ValleySpectrum spectrum);

  /// lambda_i(u) = a_i + ||u||^2.
  static QuadraticValley shifted_norm(Index p, Vector a);
  /// lambda_i(u) = a_i, independent of u.
  static QuadraticValley constant(Index p, Vector a);
  /// p = 10, m = 3, lambda_i(u) = a_i + ||u||^2 with a = (1, 2, 3).
  static QuadraticValley default_instance();
  /// Fixed off-manifold starting point for the default instance.
  static Vector default_start();

  std::string name() const override { return "valley"; }
  Index dim() const override { return p_; }
  Capabilities capabilities() const override;
  Index sharp_dim() const override { return m_; }
  std::optional<Vector> manifold_trace_grad(const Vector& z) const override;

  Index flat_dim() const noexcept { return p_ - m_; }
  Vector lambda(const Vector& u) const { return spectrum_.lambda(u); }
  /// Nearest manifold point (u, 0); not the gradient-flow limit.
  Vector manifold_point(const Vector& theta) const;

 protected:
  double do_loss(const Vector& theta) const override;
  Vector do_grad(const Vector& theta) const override;
  Matrix do_hessian(const Vector& theta) const override;

 private:
  Index p_;
  Index m_;
  ValleySpectrum spectrum_;
};

enum class FeatureMap { Linear, TanhMlp };

/// Over-parameterized least squares: L_i = (f(x_i; theta) - y_i)^2 / 2 with
/// p > n, so global minimizers interpolate and form a (p-n)-dim manifold.
///
/// Linear: f(x) = x . theta, p = d.
/// TanhMlp: f(x) = sum_j a_j tanh(w_j . x), theta = (w_1, ..., w_width, a),
/// p = width * d + width.
class InterpolatingRegression final : public Landscape {
 public:
  InterpolatingRegression(Matrix inputs, Vector targets, FeatureMap map, Index width = 0);

  /// n = 3 scalar inputs (2.5, -0.25, 1.25), width-5 tanh layer (p = 10),
  /// targets (0, 1, -1).
  static InterpolatingRegression default_instance();
  /// Starting point used for the default instance's Phase I.
  static Vector default_start();

  std::string name() const override { return "regression"; }
  Index dim() const override { return p_; }
  Index num_samples() const override { return inputs_.rows(); }
  Capabilities capabilities() const override;
  Index sharp_dim() const override { return inputs_.rows(); }

  double predict(Index i, const Vector& theta) const;
  /// grad_theta f(x_i; theta).
  Vector feature_grad(Index i, const Vector& theta) const;
  /// n x p matrix whose rows are feature_grad(i, theta).
  Matrix feature_matrix(const Vector& theta) const;
  const Vector& targets() const noexcept { return targets_; }

 protected:
  double do_loss(const Vector& theta) const override;
  Vector do_grad(const Vector& theta) const override;
  double do_sample_loss(Index i, const Vector& theta) const override;
  Vector do_sample_grad(Index i, const Vector& theta) const override;
  Matrix do_hessian(const Vector& theta) const override;

 private:
  Matrix feature_hessian(Index i, const Vector& theta) const;

  Matrix inputs_;
  Vector targets_;
  FeatureMap map_;
  Index width_;
  Index p_;
};

/// One-hidden-layer tanh classifier with softmax cross-entropy over a fixed
/// batch of B samples. theta = (W1 row-major, b1, W2 row-major, b2).
class SoftmaxModel final : public Landscape {
 public:
  SoftmaxModel(Matrix inputs, std::vector<int> labels, Index hidden, Index classes);

  /// 4 inputs, 8 hidden units, 3 classes, 16 synthetic samples (p = 67).
  static SoftmaxModel default_instance(std::uint64_t seed = 20240611);
  /// Gaussian parameters with the given scale, drawn from stream (seed, 1).
  Vector initial_point(std::uint64_t seed, double scale = 0.5) const;

  std::string name() const override { return "softmax"; }
  Index dim() const override { return p_; }
  Index num_samples() const override { return inputs_.rows(); }
  Capabilities capabilities() const override;

  Index classes() const noexcept { return classes_; }
  Vector logits(Index b, const Vector& theta) const;
  Vector probabilities(Index b, const Vector& theta) const;
  /// grad of -log softmax(f(x_b))[label] with respect to theta.
  Vector label_grad(Index b, const Vector& theta, int label) const;
  /// One label per sample drawn from the model's own predictive distribution.
  std::vector<int> sample_labels(const Vector& theta, CounterRng& rng) const;

 protected:
  double do_loss(const Vector& theta) const override;
  Vector do_grad(const Vector& theta) const override;
  double do_sample_loss(Index i, const Vector& theta) const override;
  Vector do_sample_grad(Index i, const Vector& theta) const override;
  Vector do_sampled_label_grad(const Vector& theta, CounterRng& rng) const override;

 private:
  struct Forward {
    Vector hidden;
    Vector logits;
    Vector probs;
  };
  Forward forward(Index b, const Vector& theta) const;

  Matrix inputs_;
  std::vector<int> labels_;
  Index in_;
  Index hidden_;
  Index classes_;
  Index p_;
};

}  // namespace irelab
