// Copyright 2026 The abusekit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "abusekit/gpc.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "abusekit/eigen_blob.hpp"
#include "abusekit/error.hpp"

namespace abusekit::ml {
using nlohmann::json;

namespace {

// log sigmoid(z), stable for large |z|.
double log_sigmoid(double z) { return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }

double log_likelihood(const Eigen::VectorXd& f, const Eigen::VectorXd& t) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) total += log_sigmoid(t(i) > 0.5 ? f(i) : -f(i));
  return total;
}

Eigen::VectorXd sigmoid_of(const Eigen::VectorXd& f) {
  return f.unaryExpr([](double z) { return sigmoid(z); });
}

}  // namespace

GaussHermite gauss_hermite(int n) {
  if (n < 1) throw InvalidArgument("quadrature needs at least one node");
  // Symmetric Jacobi matrix of the physicists' Hermite recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    jacobi(i, i - 1) = jacobi(i - 1, i) = std::sqrt(i / 2.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussHermite gh;
  gh.nodes = solver.eigenvalues();
  gh.weights = std::sqrt(std::numbers::pi) * solver.eigenvectors().row(0).transpose().array().square();
  return gh;
}

Eigen::MatrixXd GaussianProcessClassifier::kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const {
  const Eigen::VectorXd an = a.rowwise().squaredNorm();
  const Eigen::VectorXd bn = b.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = (-2.0 * a * b.transpose()).colwise() + an;
  d2.rowwise() += bn.transpose();
  const double scale = -0.5 / (config_.length_scale * config_.length_scale);
  return config_.signal_variance * (d2.cwiseMax(0.0) * scale).array().exp().matrix();
}

void GaussianProcessClassifier::factorize() {
  const Eigen::Index n = train_x_.rows();
  Eigen::MatrixXd k = kernel(train_x_, train_x_);
  k.diagonal().array() += config_.jitter;
  const Eigen::VectorXd pi = sigmoid_of(mode_);
  sqrt_w_ = pi.cwiseProduct(Eigen::VectorXd::Ones(n) - pi).cwiseSqrt();
  Eigen::MatrixXd b = sqrt_w_.asDiagonal() * k * sqrt_w_.asDiagonal();
  b.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(b);
  if (llt.info() != Eigen::Success) throw Error("GPC: Cholesky of I + W^1/2 K W^1/2 failed");
  chol_ = llt.matrixL();
  grad_loglik_ = targets_ - pi;
  quadrature_ = gauss_hermite(config_.quadrature_nodes);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> GaussianProcessClassifier::latent(const Eigen::MatrixXd& x) const {
  if (x.cols() != input_dim()) throw InvalidArgument("GPC input dim mismatch");
  const Eigen::MatrixXd ks = kernel(x, train_x_);  // m x n
  Eigen::VectorXd mean = ks * grad_loglik_;
  const Eigen::MatrixXd v =
      chol_.triangularView<Eigen::Lower>().solve(sqrt_w_.asDiagonal() * ks.transpose());  // n x m
  Eigen::VectorXd var = (config_.signal_variance - v.colwise().squaredNorm().array()).cwiseMax(0.0).matrix().transpose();
  return {std::move(mean), std::move(var)};
}

Eigen::VectorXd GaussianProcessClassifier::predict_proba(const Eigen::MatrixXd& x) const {
  const auto [mean, var] = latent(x);
  Eigen::VectorXd out(x.rows());
  const double norm = 1.0 / std::sqrt(std::numbers::pi);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double spread = std::sqrt(2.0 * var(i));
    double p = 0.0;
    for (Eigen::Index q = 0; q < quadrature_.nodes.size(); ++q) {
      p += quadrature_.weights(q) * sigmoid(mean(i) + spread * quadrature_.nodes(q));
    }
    out(i) = std::clamp(p * norm, 0.0, 1.0);
  }
  return out;
}

json GaussianProcessClassifier::to_json() const {
  json config = {{"dim", input_dim()},
                 {"n_train", train_x_.rows()},
                 {"signal_variance", config_.signal_variance},
                 {"length_scale", config_.length_scale},
                 {"jitter", config_.jitter},
                 {"max_newton_iterations", config_.max_newton_iterations},
                 {"tolerance", config_.tolerance},
                 {"quadrature_nodes", config_.quadrature_nodes}};
  json blobs = {{"train_x", to_blob(train_x_)}, {"targets", to_blob(targets_)}, {"mode", to_blob(mode_)}};
  return model_envelope("gpc", std::move(config), std::move(blobs));
}

GaussianProcessClassifier GaussianProcessClassifier::from_json(const json& doc) {
  const json& c = doc.at("config");
  GaussianProcessClassifier m;
  m.config_.signal_variance = c.at("signal_variance").get<double>();
  m.config_.length_scale = c.at("length_scale").get<double>();
  m.config_.jitter = c.at("jitter").get<double>();
  m.config_.max_newton_iterations = c.at("max_newton_iterations").get<int>();
  m.config_.tolerance = c.at("tolerance").get<double>();
  m.config_.quadrature_nodes = c.at("quadrature_nodes").get<int>();
  const auto dim = c.at("dim").get<Eigen::Index>();
  const auto n = c.at("n_train").get<Eigen::Index>();
  const json& b = doc.at("blobs");
  m.train_x_ = matrix_from_blob(b.at("train_x").get<std::string>(), n, dim);
  m.targets_ = vector_from_blob(b.at("targets").get<std::string>(), n);
  m.mode_ = vector_from_blob(b.at("mode").get<std::string>(), n);
  m.factorize();
  return m;
}

GaussianProcessClassifier fit_gpc(const Eigen::MatrixXd& x, std::span<const int> y, const GpcConfig& config) {
  check_training_set(x, y);
  GaussianProcessClassifier m;
  m.config_ = config;
  m.train_x_ = x;
  const Eigen::Index n = x.rows();
  m.targets_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) m.targets_(i) = y[static_cast<std::size_t>(i)];

  Eigen::MatrixXd k = m.kernel(x, x);
  k.diagonal().array() += config.jitter;

  auto objective = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& f) {
    return -0.5 * a.dot(f) + log_likelihood(f, m.targets_);
  };

  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  double current = objective(a, f);
  m.trace_.push_back(current);
  bool converged = false;
  for (int it = 0; it < config.max_newton_iterations; ++it) {
    const Eigen::VectorXd pi = sigmoid_of(f);
    const Eigen::VectorXd sw = pi.cwiseProduct(Eigen::VectorXd::Ones(n) - pi).cwiseSqrt();
    Eigen::MatrixXd b = sw.asDiagonal() * k * sw.asDiagonal();
    b.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(b);
    if (llt.info() != Eigen::Success) throw Error("GPC: Cholesky failed during Newton iteration");
    const Eigen::VectorXd grad = m.targets_ - pi;
    const Eigen::VectorXd rhs = sw.cwiseProduct(sw).cwiseProduct(f) + grad;
    const Eigen::VectorXd tmp = llt.solve(sw.cwiseProduct(k * rhs));
    const Eigen::VectorXd a_newton = rhs - sw.cwiseProduct(tmp);

    // Halve the step in a-space until the log posterior does not decrease.
    Eigen::VectorXd a_next = a_newton;
    Eigen::VectorXd f_next = k * a_next;
    double value = objective(a_next, f_next);
    for (int halvings = 0; value < current && halvings < 50; ++halvings) {
      a_next = 0.5 * (a + a_next);
      f_next = k * a_next;
      value = objective(a_next, f_next);
    }
    if (value < current) {
      value = current;
      a_next = a;
      f_next = f;
    }
    const double change = value - current;
    a = std::move(a_next);
    f = std::move(f_next);
    current = value;
    m.trace_.push_back(current);
    if (change < config.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw Error("GPC: Laplace Newton iterations did not converge in " + std::to_string(config.max_newton_iterations) +
                " iterations");
  }
  m.mode_ = f;
  m.factorize();
  return m;
}

}  // namespace abusekit::ml
