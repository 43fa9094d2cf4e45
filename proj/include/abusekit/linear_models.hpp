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

#include "abusekit/classifier.hpp"

namespace abusekit::ml {

struct LogisticRegressionConfig {
  double l2 = 1.0;  // penalty on the weights; the intercept is not penalized
  int max_iterations = 100;
  double tolerance = 1e-8;  // max-abs Newton step
};

/// L2-regularized logistic regression fitted by Newton / IRLS.
class LogisticRegression : public BinaryClassifier {
 public:
  LogisticRegression() = default;
  LogisticRegression(Eigen::VectorXd weights, double bias, LogisticRegressionConfig config = {});

  std::string kind() const override { return "logreg"; }
  Eigen::Index input_dim() const override { return weights_.size(); }
  Eigen::VectorXd predict_proba(const Eigen::MatrixXd& x) const override;
  Eigen::VectorXd decision_function(const Eigen::MatrixXd& x) const;
  nlohmann::json to_json() const override;
  static LogisticRegression from_json(const nlohmann::json& doc);

  const Eigen::VectorXd& weights() const { return weights_; }
  double bias() const { return bias_; }
  int iterations() const { return iterations_; }

  friend LogisticRegression fit_logistic_regression(const Eigen::MatrixXd&, std::span<const int>,
                                                    const LogisticRegressionConfig&);

 private:
  Eigen::VectorXd weights_;
  double bias_ = 0.0;
  LogisticRegressionConfig config_;
  int iterations_ = 0;
};

LogisticRegression fit_logistic_regression(const Eigen::MatrixXd& x, std::span<const int> y,
                                           const LogisticRegressionConfig& config = {});

struct LinearSvmConfig {
  double c = 0.025;  // weight penalty lambda = 1 / (n * C)
  int max_iterations = 5000;
  double tolerance = 1e-8;  // gradient norm
};

/// Linear SVM on the smoothed hinge loss, full-batch gradient descent.
/// predict_proba is sigmoid(decision value); no Platt calibration.
class LinearSvm : public BinaryClassifier {
 public:
  LinearSvm() = default;
  LinearSvm(Eigen::VectorXd weights, double bias, LinearSvmConfig config = {});

  std::string kind() const override { return "linsvm"; }
  Eigen::Index input_dim() const override { return weights_.size(); }
  Eigen::VectorXd predict_proba(const Eigen::MatrixXd& x) const override;
  Eigen::VectorXd decision_function(const Eigen::MatrixXd& x) const;
  nlohmann::json to_json() const override;
  static LinearSvm from_json(const nlohmann::json& doc);

  const Eigen::VectorXd& weights() const { return weights_; }
  double bias() const { return bias_; }

 private:
  Eigen::VectorXd weights_;
  double bias_ = 0.0;
  LinearSvmConfig config_;
};

/// Smoothed hinge: 1/2 - m for m <= 0, (1 - m)^2 / 2 for 0 < m < 1, else 0.
double smoothed_hinge(double margin);

LinearSvm fit_linear_svm(const Eigen::MatrixXd& x, std::span<const int> y, const LinearSvmConfig& config = {});

}  // namespace abusekit::ml
