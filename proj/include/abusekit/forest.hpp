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
#include <span>
#include <vector>

#include "abusekit/classifier.hpp"

namespace abusekit::ml {

struct ForestConfig {
  int n_trees = 10;
  int max_depth = 5;
  int min_samples_split = 2;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;   // x[feature] <= threshold
  int right = -1;  // x[feature] > threshold
  double positive_rate = 0.0;
};

/// CART tree (Gini impurity). Node 0 is the root.
struct DecisionTree {
  std::vector<TreeNode> nodes;

  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
  /// Edges on the longest root-to-leaf path.
  int depth() const;
};

/// Gini impurity of a node with `positives` out of `total`.
double gini(double positives, double total);

/// Bootstrap forest with sqrt(d) candidate features per split. Probability
/// is the mean over trees of the leaf's class-1 frequency.
class RandomForest : public BinaryClassifier {
 public:
  RandomForest() = default;

  std::string kind() const override { return "rforest"; }
  Eigen::Index input_dim() const override { return dim_; }
  Eigen::VectorXd predict_proba(const Eigen::MatrixXd& x) const override;
  nlohmann::json to_json() const override;
  static RandomForest from_json(const nlohmann::json& doc);

  const std::vector<DecisionTree>& trees() const { return trees_; }
  const ForestConfig& config() const { return config_; }

  friend RandomForest fit_random_forest(const Eigen::MatrixXd&, std::span<const int>, std::uint64_t,
                                        const ForestConfig&);

 private:
  ForestConfig config_;
  Eigen::Index dim_ = 0;
  std::vector<DecisionTree> trees_;
};

/// Tree t draws from derive_seed(seed, t), so trees are independent of
/// training order.
RandomForest fit_random_forest(const Eigen::MatrixXd& x, std::span<const int> y, std::uint64_t seed,
                               const ForestConfig& config = {});

}  // namespace abusekit::ml
