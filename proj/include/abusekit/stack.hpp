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
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "abusekit/classifier.hpp"
#include "abusekit/linear_models.hpp"

namespace abusekit::ml {

enum class BaseKind { kGpc, kMlp100, kLinSvm, kRandomForest, kLogReg };

inline constexpr BaseKind kStackBases[] = {BaseKind::kGpc, BaseKind::kMlp100, BaseKind::kLinSvm,
                                           BaseKind::kRandomForest, BaseKind::kLogReg};

std::string_view to_string(BaseKind kind);

/// Fits one stack base with its fixed hyperparameters:
///   gpc     1.0 * RBF(1.0), Laplace
///   mlp100  one hidden layer of 100, Adam lr 1e-3, batch min(200, n), 200 epochs
///   linsvm  C = 0.025
///   rforest 10 trees, max depth 5
///   logreg  L2 = 1
std::unique_ptr<BinaryClassifier> fit_base(BaseKind kind, const Eigen::MatrixXd& x, std::span<const int> y,
                                           std::uint64_t seed);

/// Five bases fitted on the full training set plus a logistic-regression
/// meta learner over their P(label = 1) outputs.
class StackClassifier : public BinaryClassifier {
 public:
  StackClassifier() = default;
  StackClassifier(std::vector<std::unique_ptr<BinaryClassifier>> bases, LogisticRegression meta);

  std::string kind() const override { return "stack"; }
  Eigen::Index input_dim() const override;
  Eigen::VectorXd predict_proba(const Eigen::MatrixXd& x) const override;
  nlohmann::json to_json() const override;
  static StackClassifier from_json(const nlohmann::json& doc);

  /// n x 5 matrix of base probabilities, the meta learner's input.
  Eigen::MatrixXd meta_features(const Eigen::MatrixXd& x) const;

  const std::vector<std::unique_ptr<BinaryClassifier>>& bases() const { return bases_; }
  const LogisticRegression& meta() const { return meta_; }

 private:
  std::vector<std::unique_ptr<BinaryClassifier>> bases_;
  LogisticRegression meta_;
};

StackClassifier train_stack(const Eigen::MatrixXd& x, std::span<const int> y, std::uint64_t seed);

}  // namespace abusekit::ml
