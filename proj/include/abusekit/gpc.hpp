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


#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "abusekit/classifier.hpp"

namespace abusekit::ml {

struct GpcConfig {
  double signal_variance = 1.0;  // 1.0 * RBF(1.0)
  double length_scale = 1.0;
  double jitter = 1e-8;
  int max_newton_iterations = 100;
  double tolerance = 1e-10;  // change in the log posterior
  int quadrature_nodes = 20;
};

/// Gauss-Hermite nodes and weights for weight function exp(-t^2)
/// (Golub-Welsch).
struct GaussHermite {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
GaussHermite gauss_hermite(int n);

/// Binary GP classifier with a logistic likelihood and the Laplace
/// approximation. Keeps its training inputs; predictions integrate the
/// sigmoid over the latent Gaussian by Gauss-Hermite quadrature.
class GaussianProcessClassifier : public BinaryClassifier {
 public:
  GaussianProcessClassifier() = default;

  std::string kind() const override { return "gpc"; }
  Eigen::Index input_dim() const override { return train_x_.cols(); }
  Eigen::VectorXd predict_proba(const Eigen::MatrixXd& x) const override;
  nlohmann::json to_json() const override;
  static GaussianProcessClassifier from_json(const nlohmann::json& doc);

  /// Posterior latent mean and variance at each row of `x`.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> latent(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const;

  const Eigen::VectorXd& mode() const { return mode_; }
  /// Unnormalized log posterior -1/2 f'K^-1 f + log p(y|f): starting value,
  /// then one entry per Newton iteration.
  const std::vector<double>& objective_trace() const { return trace_; }

  friend GaussianProcessClassifier fit_gpc(const Eigen::MatrixXd&, std::span<const int>, const GpcConfig&);

 private:
  void factorize();

  GpcConfig config_;
  Eigen::MatrixXd train_x_;
  Eigen::VectorXd targets_;  // 0/1
  Eigen::VectorXd mode_;     // Laplace mode f-hat
  std::vector<double> trace_;
  // Cached at fit/load: sqrt(W) and the Cholesky factor of I + sqrt(W) K sqrt(W).
  Eigen::VectorXd sqrt_w_;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd grad_loglik_;
  GaussHermite quadrature_;
};

/// Newton iterations (with step halving) on the Laplace mode. Throws Error
/// when the objective has not converged after max_newton_iterations.
GaussianProcessClassifier fit_gpc(const Eigen::MatrixXd& x, std::span<const int> y, const GpcConfig& config = {});

}  // namespace abusekit::ml
