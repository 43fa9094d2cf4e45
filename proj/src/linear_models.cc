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


#include "abusekit/linear_models.hpp"

#include <cmath>

#include "abusekit/eigen_blob.hpp"
#include "abusekit/error.hpp"

namespace abusekit::ml {
using nlohmann::json;

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out(x.rows(), x.cols() + 1);
  out.leftCols(x.cols()) = x;
  out.col(x.cols()).setOnes();
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Logistic regression

LogisticRegression::LogisticRegression(Eigen::VectorXd weights, double bias, LogisticRegressionConfig config)
    : weights_(std::move(weights)), bias_(bias), config_(config) {}

Eigen::VectorXd LogisticRegression::decision_function(const Eigen::MatrixXd& x) const {
  if (x.cols() != input_dim()) throw InvalidArgument("logistic regression input dim mismatch");
  return (x * weights_).array() + bias_;
}

Eigen::VectorXd LogisticRegression::predict_proba(const Eigen::MatrixXd& x) const {
  return decision_function(x).unaryExpr([](double z) { return sigmoid(z); });
}

json LogisticRegression::to_json() const {
  return model_envelope("logreg",
                        {{"dim", input_dim()},
                         {"l2", config_.l2},
                         {"max_iterations", config_.max_iterations},
                         {"tolerance", config_.tolerance}},
                        {{"weights", to_blob(weights_)}, {"bias", bias_}});
}

LogisticRegression LogisticRegression::from_json(const json& doc) {
  const json& c = doc.at("config");
  LogisticRegressionConfig config{c.at("l2").get<double>(), c.at("max_iterations").get<int>(),
                                  c.at("tolerance").get<double>()};
  const auto dim = c.at("dim").get<Eigen::Index>();
  return {vector_from_blob(doc.at("blobs").at("weights").get<std::string>(), dim),
          doc.at("blobs").at("bias").get<double>(), config};
}

LogisticRegression fit_logistic_regression(const Eigen::MatrixXd& x, std::span<const int> y,
                                           const LogisticRegressionConfig& config) {
  check_training_set(x, y);
  const Eigen::Index n = x.rows(), d = x.cols();
  const Eigen::MatrixXd xa = with_intercept(x);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) target(i) = y[static_cast<std::size_t>(i)];

  // Penalty applies to weights only.
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d + 1, config.l2);
  penalty(d) = 0.0;

  auto objective = [&](const Eigen::VectorXd& theta) {
    const Eigen::VectorXd z = xa * theta;
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) total += softplus(z(i)) - target(i) * z(i);
    return total + 0.5 * theta.cwiseProduct(penalty).dot(theta);
  };

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  double current = objective(theta);
  int iter = 0;
  for (; iter < config.max_iterations; ++iter) {
    const Eigen::VectorXd p = (xa * theta).unaryExpr([](double z) { return sigmoid(z); });
    const Eigen::VectorXd grad = xa.transpose() * (p - target) + penalty.cwiseProduct(theta);
    const Eigen::VectorXd w = p.cwiseProduct(Eigen::VectorXd::Ones(n) - p);
    Eigen::MatrixXd hessian = xa.transpose() * w.asDiagonal() * xa;
    hessian.diagonal() += penalty;
    // Unpenalized intercept on separable data can make the Hessian singular.
    hessian.diagonal().array() += 1e-12;
    Eigen::VectorXd step = hessian.ldlt().solve(grad);

    // Newton step with halving so the objective never increases.
    double scale = 1.0;
    Eigen::VectorXd candidate = theta - step;
    double value = objective(candidate);
    while (value > current && scale > 1e-10) {
      scale *= 0.5;
      candidate = theta - scale * step;
      value = objective(candidate);
    }
    theta = candidate;
    current = value;
    if ((scale * step).cwiseAbs().maxCoeff() < config.tolerance) {
      ++iter;
      break;
    }
  }

  LogisticRegression model(theta.head(d), theta(d), config);
  model.iterations_ = iter;
  return model;
}

// ---------------------------------------------------------------------------
// Linear SVM

double smoothed_hinge(double margin) {
  if (margin >= 1.0) return 0.0;
  if (margin <= 0.0) return 0.5 - margin;
  return 0.5 * (1.0 - margin) * (1.0 - margin);
}

namespace {

// d/dm of smoothed_hinge.
double smoothed_hinge_slope(double margin) {
  if (margin >= 1.0) return 0.0;
  if (margin <= 0.0) return -1.0;
  return margin - 1.0;
}

}  // namespace

LinearSvm::LinearSvm(Eigen::VectorXd weights, double bias, LinearSvmConfig config)
    : weights_(std::move(weights)), bias_(bias), config_(config) {}

Eigen::VectorXd LinearSvm::decision_function(const Eigen::MatrixXd& x) const {
  if (x.cols() != input_dim()) throw InvalidArgument("linear SVM input dim mismatch");
  return (x * weights_).array() + bias_;
}

Eigen::VectorXd LinearSvm::predict_proba(const Eigen::MatrixXd& x) const {
  return decision_function(x).unaryExpr([](double z) { return sigmoid(z); });
}

json LinearSvm::to_json() const {
  return model_envelope("linsvm",
                        {{"dim", input_dim()},
                         {"c", config_.c},
                         {"max_iterations", config_.max_iterations},
                         {"tolerance", config_.tolerance}},
                        {{"weights", to_blob(weights_)}, {"bias", bias_}});
}

LinearSvm LinearSvm::from_json(const json& doc) {
  const json& c = doc.at("config");
  LinearSvmConfig config{c.at("c").get<double>(), c.at("max_iterations").get<int>(), c.at("tolerance").get<double>()};
  const auto dim = c.at("dim").get<Eigen::Index>();
  return {vector_from_blob(doc.at("blobs").at("weights").get<std::string>(), dim),
          doc.at("blobs").at("bias").get<double>(), config};
}

LinearSvm fit_linear_svm(const Eigen::MatrixXd& x, std::span<const int> y, const LinearSvmConfig& config) {
  check_training_set(x, y);
  if (!(config.c > 0.0)) throw InvalidArgument("SVM C must be positive");
  const Eigen::Index n = x.rows(), d = x.cols();
  const double nd = static_cast<double>(n);
  const double lambda = 1.0 / (nd * config.c);
  const Eigen::MatrixXd xa = with_intercept(x);
  Eigen::VectorXd sign(n);
  for (Eigen::Index i = 0; i < n; ++i) sign(i) = y[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;

  // Lipschitz constant of the gradient: lambda_max(X'X / n) + lambda.
  Eigen::VectorXd v = Eigen::VectorXd::Ones(d + 1).normalized();
  double top = 0.0;
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd w = xa.transpose() * (xa * v) / nd;
    const double norm = w.norm();
    if (norm == 0.0) break;
    top = norm;
    v = w / norm;
  }
  const double step = 1.0 / (1.05 * top + lambda);

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  for (int it = 0; it < config.max_iterations; ++it) {
    const Eigen::VectorXd margin = sign.cwiseProduct(xa * theta);
    Eigen::VectorXd coeff(n);
    for (Eigen::Index i = 0; i < n; ++i) coeff(i) = smoothed_hinge_slope(margin(i)) * sign(i);
    Eigen::VectorXd grad = xa.transpose() * coeff / nd;
    grad.head(d) += lambda * theta.head(d);
    if (grad.norm() < config.tolerance) break;
    theta -= step * grad;
  }
  return {theta.head(d), theta(d), config};
}

}  // namespace abusekit::ml
