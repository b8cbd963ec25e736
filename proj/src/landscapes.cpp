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

#include "irelab/landscapes.hpp"

#include <cmath>
#include <utility>

namespace irelab {

// ---------------------------------------------------------------------------
// QuadraticValley

QuadraticValley::QuadraticValley(Index p, Index m, ValleySpectrum spectrum)
    : p_(p), m_(m), spectrum_(std::move(spectrum)) {
  if (m < 1 || m >= p) throw std::invalid_argument("QuadraticValley: need 1 <= m < p");
  if (!spectrum_.lambda || !spectrum_.jacobian)
    throw std::invalid_argument("QuadraticValley: lambda and its Jacobian are required");
}

QuadraticValley QuadraticValley::shifted_norm(Index p, Vector a) {
  const Index m = a.size();
  ValleySpectrum s;
  s.lambda = [a](const Vector& u) -> Vector {
    return a.array() + u.squaredNorm();
  };
  s.jacobian = [m](const Vector& u) -> Matrix {
    Matrix j(m, u.size());
    for (Index i = 0; i < m; ++i) j.row(i) = 2.0 * u.transpose();
    return j;
  };
  s.hessians = [m](const Vector& u) {
    return std::vector<Matrix>(static_cast<std::size_t>(m),
                               2.0 * Matrix::Identity(u.size(), u.size()));
  };
  return QuadraticValley(p, m, std::move(s));
}

QuadraticValley QuadraticValley::constant(Index p, Vector a) {
  const Index m = a.size();
  ValleySpectrum s;
  s.lambda = [a](const Vector&) -> Vector { return a; };
  s.jacobian = [m](const Vector& u) -> Matrix { return Matrix::Zero(m, u.size()); };
  s.hessians = [m](const Vector& u) {
    return std::vector<Matrix>(static_cast<std::size_t>(m), Matrix::Zero(u.size(), u.size()));
  };
  return QuadraticValley(p, m, std::move(s));
}

QuadraticValley QuadraticValley::default_instance() {
  return shifted_norm(10, Vector::LinSpaced(3, 1.0, 3.0));
}

Vector QuadraticValley::default_start() {
  Vector theta(10);
  theta << 0.5, -0.3, 0.2, 0.4, -0.1, 0.3, 0.2, 0.3, -0.2, 0.1;
  return theta;
}

Capabilities QuadraticValley::capabilities() const {
  Capabilities c;
  c.exact_hessian = static_cast<bool>(spectrum_.hessians);
  c.exact_diag_hessian = c.exact_hessian;
  c.analytic_manifold = true;
  c.zero_loss_minima = true;
  return c;
}

Vector QuadraticValley::manifold_point(const Vector& theta) const {
  check_point(theta);
  Vector z = theta;
  z.tail(m_).setZero();
  return z;
}

double QuadraticValley::do_loss(const Vector& theta) const {
  const Vector lambda = spectrum_.lambda(theta.head(flat_dim()));
  return 0.5 * (lambda.array() * theta.tail(m_).array().square()).sum();
}

Vector QuadraticValley::do_grad(const Vector& theta) const {
  const Vector u = theta.head(flat_dim());
  const Vector v = theta.tail(m_);
  Vector g(p_);
  g.head(flat_dim()) = 0.5 * spectrum_.jacobian(u).transpose() * v.array().square().matrix();
  g.tail(m_) = spectrum_.lambda(u).cwiseProduct(v);
  return g;
}

Matrix QuadraticValley::do_hessian(const Vector& theta) const {
  if (!spectrum_.hessians) return finite_difference_hessian(theta);
  const Index q = flat_dim();
  const Vector u = theta.head(q);
  const Vector v = theta.tail(m_);
  const Matrix jac = spectrum_.jacobian(u);
  const std::vector<Matrix> hess = spectrum_.hessians(u);

  Matrix h = Matrix::Zero(p_, p_);
  for (Index i = 0; i < m_; ++i) {
    h.topLeftCorner(q, q) += 0.5 * v[i] * v[i] * hess[static_cast<std::size_t>(i)];
    h.block(0, q + i, q, 1) = v[i] * jac.row(i).transpose();
    h.block(q + i, 0, 1, q) = v[i] * jac.row(i);
  }
  h.bottomRightCorner(m_, m_) = spectrum_.lambda(u).asDiagonal();
  return h;
}

// On v = 0 the trace is sum_i lambda_i(u); the v^2-weighted terms have zero gradient.
std::optional<Vector> QuadraticValley::manifold_trace_grad(const Vector& z) const {
  check_point(z);
  Vector g = Vector::Zero(p_);
  g.head(flat_dim()) = spectrum_.jacobian(z.head(flat_dim())).transpose() * Vector::Ones(m_);
  return g;
}

// ---------------------------------------------------------------------------
// InterpolatingRegression

InterpolatingRegression::InterpolatingRegression(Matrix inputs, Vector targets, FeatureMap map,
                                                 Index width)
    : inputs_(std::move(inputs)), targets_(std::move(targets)), map_(map), width_(width) {
  if (inputs_.rows() == 0 || inputs_.rows() != targets_.size())
    throw std::invalid_argument("InterpolatingRegression: inputs/targets size mismatch");
  const Index d = inputs_.cols();
  if (map_ == FeatureMap::Linear) {
    width_ = 0;
    p_ = d;
  } else {
    if (width_ < 1) throw std::invalid_argument("InterpolatingRegression: width must be >= 1");
    p_ = width_ * d + width_;
  }
  if (p_ <= inputs_.rows())
    throw std::invalid_argument("InterpolatingRegression: need more parameters than samples");
}

InterpolatingRegression InterpolatingRegression::default_instance() {
  Matrix x(3, 1);
  x << 2.5, -0.25, 1.25;
  Vector y(3);
  y << 0.0, 1.0, -1.0;
  return InterpolatingRegression(x, y, FeatureMap::TanhMlp, 5);
}

Vector InterpolatingRegression::default_start() {
  Vector theta(10);
  // Near the interpolating point w = (2, -0.5, -0.25, -0.75, -0.75) with
  // min-norm output weights, where the sharp eigenvalues are about
  // (5.0, 0.39, 0.064).
  theta << 2.05, -0.54, -0.22, -0.69, -0.80,  // hidden weights
      -3.29, -1.37, -1.11, -0.87, -0.79;       // output weights
  return theta;
}

Capabilities InterpolatingRegression::capabilities() const {
  Capabilities c;
  c.exact_hessian = true;
  c.exact_diag_hessian = true;
  c.zero_loss_minima = true;
  return c;
}

double InterpolatingRegression::predict(Index i, const Vector& theta) const {
  const auto x = inputs_.row(i);
  if (map_ == FeatureMap::Linear) return x.dot(theta);
  const Index d = inputs_.cols();
  double f = 0.0;
  for (Index j = 0; j < width_; ++j) {
    const double z = x.dot(theta.segment(j * d, d));
    f += theta[width_ * d + j] * std::tanh(z);
  }
  return f;
}

Vector InterpolatingRegression::feature_grad(Index i, const Vector& theta) const {
  const auto x = inputs_.row(i);
  if (map_ == FeatureMap::Linear) return x.transpose();
  const Index d = inputs_.cols();
  Vector g(p_);
  for (Index j = 0; j < width_; ++j) {
    const double t = std::tanh(x.dot(theta.segment(j * d, d)));
    const double a = theta[width_ * d + j];
    g.segment(j * d, d) = a * (1.0 - t * t) * x.transpose();
    g[width_ * d + j] = t;
  }
  return g;
}

Matrix InterpolatingRegression::feature_matrix(const Vector& theta) const {
  check_point(theta);
  Matrix j(inputs_.rows(), p_);
  for (Index i = 0; i < inputs_.rows(); ++i) j.row(i) = feature_grad(i, theta).transpose();
  return j;
}

Matrix InterpolatingRegression::feature_hessian(Index i, const Vector& theta) const {
  Matrix h = Matrix::Zero(p_, p_);
  if (map_ == FeatureMap::Linear) return h;
  const auto x = inputs_.row(i);
  const Index d = inputs_.cols();
  for (Index j = 0; j < width_; ++j) {
    const double t = std::tanh(x.dot(theta.segment(j * d, d)));
    const double s = 1.0 - t * t;
    const double a = theta[width_ * d + j];
    const Index aj = width_ * d + j;
    h.block(j * d, j * d, d, d) = (-2.0 * a * t * s) * x.transpose() * x;
    h.block(j * d, aj, d, 1) = s * x.transpose();
    h.block(aj, j * d, 1, d) = s * x;
  }
  return h;
}

double InterpolatingRegression::do_sample_loss(Index i, const Vector& theta) const {
  const double r = predict(i, theta) - targets_[i];
  return 0.5 * r * r;
}

Vector InterpolatingRegression::do_sample_grad(Index i, const Vector& theta) const {
  return (predict(i, theta) - targets_[i]) * feature_grad(i, theta);
}

double InterpolatingRegression::do_loss(const Vector& theta) const {
  double s = 0.0;
  for (Index i = 0; i < num_samples(); ++i) s += do_sample_loss(i, theta);
  return s / static_cast<double>(num_samples());
}

Vector InterpolatingRegression::do_grad(const Vector& theta) const {
  Vector g = Vector::Zero(p_);
  for (Index i = 0; i < num_samples(); ++i) g += do_sample_grad(i, theta);
  return g / static_cast<double>(num_samples());
}

Matrix InterpolatingRegression::do_hessian(const Vector& theta) const {
  Matrix h = Matrix::Zero(p_, p_);
  for (Index i = 0; i < num_samples(); ++i) {
    const Vector g = feature_grad(i, theta);
    const double r = predict(i, theta) - targets_[i];
    h += g * g.transpose() + r * feature_hessian(i, theta);
  }
  return h / static_cast<double>(num_samples());
}

// ---------------------------------------------------------------------------
// SoftmaxModel

SoftmaxModel::SoftmaxModel(Matrix inputs, std::vector<int> labels, Index hidden, Index classes)
    : inputs_(std::move(inputs)),
      labels_(std::move(labels)),
      in_(inputs_.cols()),
      hidden_(hidden),
      classes_(classes),
      p_(hidden * inputs_.cols() + hidden + classes * hidden + classes) {
  if (inputs_.rows() < 1 || static_cast<std::size_t>(inputs_.rows()) != labels_.size())
    throw std::invalid_argument("SoftmaxModel: inputs/labels size mismatch");
  if (hidden_ < 1 || classes_ < 2)
    throw std::invalid_argument("SoftmaxModel: need hidden >= 1 and classes >= 2");
  for (int y : labels_)
    if (y < 0 || y >= classes_) throw std::invalid_argument("SoftmaxModel: label out of range");
}

SoftmaxModel SoftmaxModel::default_instance(std::uint64_t seed) {
  constexpr Index kBatch = 16, kIn = 4, kHidden = 8, kClasses = 3;
  CounterRng rng = CounterRng::stream(seed, 0);
  Matrix x(kBatch, kIn);
  for (Index b = 0; b < kBatch; ++b)
    for (Index k = 0; k < kIn; ++k) x(b, k) = rng.normal();
  std::vector<int> y(static_cast<std::size_t>(kBatch));
  for (auto& label : y) label = static_cast<int>(rng.below(kClasses));
  return SoftmaxModel(std::move(x), std::move(y), kHidden, kClasses);
}

Vector SoftmaxModel::initial_point(std::uint64_t seed, double scale) const {
  CounterRng rng = CounterRng::stream(seed, 1);
  return scale * rng.normal_vector(p_);
}

Capabilities SoftmaxModel::capabilities() const {
  Capabilities c;
  c.sampled_label_gradient = true;
  return c;
}

SoftmaxModel::Forward SoftmaxModel::forward(Index b, const Vector& theta) const {
  const Index w1 = 0, b1 = hidden_ * in_, w2 = b1 + hidden_, b2 = w2 + classes_ * hidden_;
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      W1(theta.data() + w1, hidden_, in_), W2(theta.data() + w2, classes_, hidden_);
  Forward f;
  f.hidden = (W1 * inputs_.row(b).transpose() + theta.segment(b1, hidden_)).array().tanh();
  f.logits = W2 * f.hidden + theta.segment(b2, classes_);
  f.probs = (f.logits.array() - f.logits.maxCoeff()).exp();
  f.probs /= f.probs.sum();
  return f;
}

Vector SoftmaxModel::logits(Index b, const Vector& theta) const {
  check_point(theta);
  return forward(b, theta).logits;
}

Vector SoftmaxModel::probabilities(Index b, const Vector& theta) const {
  check_point(theta);
  return forward(b, theta).probs;
}

Vector SoftmaxModel::label_grad(Index b, const Vector& theta, int label) const {
  const Index b1 = hidden_ * in_, w2 = b1 + hidden_, b2 = w2 + classes_ * hidden_;
  const Forward f = forward(b, theta);
  Vector dz = f.probs;
  dz[label] -= 1.0;

  Vector g(p_);
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      W2(theta.data() + w2, classes_, hidden_);
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> gW1(
      g.data(), hidden_, in_),
      gW2(g.data() + w2, classes_, hidden_);
  gW2 = dz * f.hidden.transpose();
  g.segment(b2, classes_) = dz;
  const Vector dpre = (W2.transpose() * dz).cwiseProduct(
      (1.0 - f.hidden.array().square()).matrix());
  gW1 = dpre * inputs_.row(b);
  g.segment(b1, hidden_) = dpre;
  return g;
}

std::vector<int> SoftmaxModel::sample_labels(const Vector& theta, CounterRng& rng) const {
  check_point(theta);
  std::vector<int> out(static_cast<std::size_t>(num_samples()));
  for (Index b = 0; b < num_samples(); ++b) {
    const Vector probs = forward(b, theta).probs;
    const double u = rng.uniform();
    double cumulative = 0.0;
    int label = static_cast<int>(classes_) - 1;
    for (Index k = 0; k < classes_; ++k) {
      cumulative += probs[k];
      if (u < cumulative) {
        label = static_cast<int>(k);
        break;
      }
    }
    out[static_cast<std::size_t>(b)] = label;
  }
  return out;
}

double SoftmaxModel::do_sample_loss(Index i, const Vector& theta) const {
  const Vector z = forward(i, theta).logits;
  const double zmax = z.maxCoeff();
  const double lse = zmax + std::log((z.array() - zmax).exp().sum());
  return lse - z[labels_[static_cast<std::size_t>(i)]];
}

Vector SoftmaxModel::do_sample_grad(Index i, const Vector& theta) const {
  return label_grad(i, theta, labels_[static_cast<std::size_t>(i)]);
}

double SoftmaxModel::do_loss(const Vector& theta) const {
  double s = 0.0;
  for (Index b = 0; b < num_samples(); ++b) s += do_sample_loss(b, theta);
  return s / static_cast<double>(num_samples());
}

Vector SoftmaxModel::do_grad(const Vector& theta) const {
  Vector g = Vector::Zero(p_);
  for (Index b = 0; b < num_samples(); ++b) g += do_sample_grad(b, theta);
  return g / static_cast<double>(num_samples());
}

Vector SoftmaxModel::do_sampled_label_grad(const Vector& theta, CounterRng& rng) const {
  const std::vector<int> labels = sample_labels(theta, rng);
  Vector g = Vector::Zero(p_);
  for (Index b = 0; b < num_samples(); ++b)
    g += label_grad(b, theta, labels[static_cast<std::size_t>(b)]);
  return g / static_cast<double>(num_samples());
}

}  // namespace irelab
