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

#include "irelab/landscape.hpp"

#include <cmath>

namespace irelab {

void Landscape::set_admissible_radius(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("admissible radius must be positive");
  radius_ = radius;
}

void Landscape::check_point(const Vector& theta) const {
  if (theta.size() != dim())
    throw std::invalid_argument(name() + ": expected " + std::to_string(dim()) +
                                " parameters, got " + std::to_string(theta.size()));
  if (!theta.allFinite()) throw DivergenceError(name() + ": non-finite parameters");
  if (theta.norm() > radius_)
    throw DivergenceError(name() + ": parameters left the admissible radius " +
                          std::to_string(radius_));
}

void Landscape::check_sample(Index i) const {
  if (i < 0 || i >= num_samples())
    throw std::out_of_range(name() + ": sample index " + std::to_string(i) + " out of range [0, " +
                            std::to_string(num_samples()) + ")");
}

double Landscape::loss(const Vector& theta) const {
  check_point(theta);
  const double value = do_loss(theta);
  if (!std::isfinite(value)) throw DivergenceError(name() + ": non-finite loss");
  return value;
}

Vector Landscape::grad(const Vector& theta) const {
  check_point(theta);
  Vector g = do_grad(theta);
  if (!g.allFinite()) throw DivergenceError(name() + ": non-finite gradient");
  return g;
}

double Landscape::sample_loss(Index i, const Vector& theta) const {
  check_point(theta);
  check_sample(i);
  return do_sample_loss(i, theta);
}

Vector Landscape::sample_grad(Index i, const Vector& theta) const {
  check_point(theta);
  check_sample(i);
  Vector g = do_sample_grad(i, theta);
  if (!g.allFinite()) throw DivergenceError(name() + ": non-finite sample gradient");
  return g;
}

linalg::SymMatrix Landscape::hessian(const Vector& theta) const {
  check_point(theta);
  return linalg::SymMatrix(do_hessian(theta));
}

Vector Landscape::diag_hessian(const Vector& theta) const {
  check_point(theta);
  return do_diag_hessian(theta);
}

Vector Landscape::sampled_label_grad(const Vector& theta, CounterRng& rng) const {
  if (!capabilities().sampled_label_gradient)
    throw std::logic_error(name() + ": no sampled-label gradient oracle");
  check_point(theta);
  return do_sampled_label_grad(theta, rng);
}

std::optional<Vector> Landscape::manifold_trace_grad(const Vector&) const { return std::nullopt; }

double Landscape::do_sample_loss(Index, const Vector& theta) const { return do_loss(theta); }

Vector Landscape::do_sample_grad(Index, const Vector& theta) const { return do_grad(theta); }

Matrix Landscape::do_hessian(const Vector& theta) const { return finite_difference_hessian(theta); }

Vector Landscape::do_diag_hessian(const Vector& theta) const {
  if (capabilities().exact_hessian) return do_hessian(theta).diagonal();
  const double h = kDiagFiniteDifferenceStep;
  const double center = do_loss(theta);
  Vector out(dim());
  Vector x = theta;
  for (Index i = 0; i < dim(); ++i) {
    x[i] = theta[i] + h;
    const double plus = do_loss(x);
    x[i] = theta[i] - h;
    const double minus = do_loss(x);
    x[i] = theta[i];
    out[i] = (plus - 2.0 * center + minus) / (h * h);
  }
  return out;
}

Vector Landscape::do_sampled_label_grad(const Vector&, CounterRng&) const {
  throw std::logic_error(name() + ": no sampled-label gradient oracle");
}

Matrix Landscape::finite_difference_hessian(const Vector& theta) const {
  const double h = kHessianFiniteDifferenceStep;
  const Index p = dim();
  Matrix out(p, p);
  Vector x = theta;
  for (Index j = 0; j < p; ++j) {
    x[j] = theta[j] + h;
    const Vector plus = do_grad(x);
    x[j] = theta[j] - h;
    const Vector minus = do_grad(x);
    x[j] = theta[j];
    out.col(j) = (plus - minus) / (2.0 * h);
  }
  return 0.5 * (out + out.transpose());
}

Capabilities Toy2D::capabilities() const {
  Capabilities c;
  c.exact_hessian = true;
  c.exact_diag_hessian = true;
  c.analytic_manifold = true;
  c.zero_loss_minima = true;
  return c;
}

double Toy2D::do_loss(const Vector& theta) const {
  const double u = theta[0], v = theta[1];
  return (1.0 + u * u) * v * v / 2.0;
}

Vector Toy2D::do_grad(const Vector& theta) const {
  const double u = theta[0], v = theta[1];
  Vector g(2);
  g << u * v * v, (1.0 + u * u) * v;
  return g;
}

Matrix Toy2D::do_hessian(const Vector& theta) const {
  const double u = theta[0], v = theta[1];
  Matrix h(2, 2);
  h << v * v, 2.0 * u * v, 2.0 * u * v, 1.0 + u * u;
  return h;
}

// Tr = v^2 + 1 + u^2 everywhere.
std::optional<Vector> Toy2D::manifold_trace_grad(const Vector& z) const {
  check_point(z);
  Vector g(2);
  g << 2.0 * z[0], 2.0 * z[1];
  return g;
}

}  // namespace irelab
