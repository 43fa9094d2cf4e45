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


#include "abusekit/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "abusekit/eigen_blob.hpp"
#include "abusekit/error.hpp"
#include "abusekit/rng.hpp"

namespace abusekit::ml {
using nlohmann::json;

double gini(double positives, double total) {
  if (total <= 0.0) return 0.0;
  const double p = positives / total;
  return 2.0 * p * (1.0 - p);
}

double DecisionTree::predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  int node = 0;
  while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const TreeNode& n = nodes[static_cast<std::size_t>(node)];
    node = x(n.feature) <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(node)].positive_rate;
}

int DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<int> level(nodes.size(), 0);
  int deepest = 0;
  // Children are always appended after their parent.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes[i].feature >= 0) {
      level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = INFINITY;
};

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& x, std::span<const int> y, const ForestConfig& config, Rng& rng)
      : x_(x), y_(y), config_(config), rng_(rng) {
    const auto d = static_cast<int>(x.cols());
    max_features_ = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(d)))));
  }

  DecisionTree build(std::vector<Eigen::Index> samples) {
    tree_.nodes.clear();
    grow(std::move(samples), 0);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<Eigen::Index> samples, int depth) {
    const int index = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    double positives = 0.0;
    for (auto s : samples) positives += y_[static_cast<std::size_t>(s)];
    const double total = static_cast<double>(samples.size());
    tree_.nodes[static_cast<std::size_t>(index)].positive_rate = positives / total;

    const bool pure = positives == 0.0 || positives == total;
    if (pure || depth >= config_.max_depth || static_cast<int>(samples.size()) < config_.min_samples_split) {
      return index;
    }
    const Split split = best_split(samples);
    if (split.feature < 0) return index;

    std::vector<Eigen::Index> left, right;
    for (auto s : samples) (x_(s, split.feature) <= split.threshold ? left : right).push_back(s);
    samples.clear();
    samples.shrink_to_fit();
    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    TreeNode& node = tree_.nodes[static_cast<std::size_t>(index)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return index;
  }

  bool constant_in(const std::vector<Eigen::Index>& samples, int feature) const {
    const double first = x_(samples.front(), feature);
    return std::all_of(samples.begin(), samples.end(), [&](Eigen::Index s) { return x_(s, feature) == first; });
  }

  Split best_split(const std::vector<Eigen::Index>& samples) {
    // Visit features in random order; constant ones do not count toward
    // the sqrt(d) budget.
    std::vector<int> order(static_cast<std::size_t>(x_.cols()));
    std::iota(order.begin(), order.end(), 0);
    rng_.shuffle(std::span<int>(order));
    std::vector<int> candidates;
    for (int f : order) {
      if (static_cast<int>(candidates.size()) >= max_features_) break;
      if (!constant_in(samples, f)) candidates.push_back(f);
    }
    std::sort(candidates.begin(), candidates.end());

    Split best;
    const double total = static_cast<double>(samples.size());
    double total_pos = 0.0;
    for (auto s : samples) total_pos += y_[static_cast<std::size_t>(s)];
    std::vector<std::pair<double, int>> column(samples.size());
    for (int f : candidates) {
      for (std::size_t i = 0; i < samples.size(); ++i) {
        column[i] = {x_(samples[i], f), y_[static_cast<std::size_t>(samples[i])]};
      }
      std::sort(column.begin(), column.end());
      double left_pos = 0.0;
      for (std::size_t i = 0; i + 1 < column.size(); ++i) {
        left_pos += column[i].second;
        if (column[i].first == column[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = total - nl;
        const double impurity = (nl * gini(left_pos, nl) + nr * gini(total_pos - left_pos, nr)) / total;
        if (impurity < best.impurity) {
          double threshold = 0.5 * (column[i].first + column[i + 1].first);
          if (threshold >= column[i + 1].first) threshold = column[i].first;
          best = {f, threshold, impurity};
        }
      }
    }
    return best;
  }

  const Eigen::MatrixXd& x_;
  std::span<const int> y_;
  const ForestConfig& config_;
  Rng& rng_;
  int max_features_ = 1;
  DecisionTree tree_;
};

}  // namespace

Eigen::VectorXd RandomForest::predict_proba(const Eigen::MatrixXd& x) const {
  if (x.cols() != dim_) throw InvalidArgument("random forest input dim mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (const auto& tree : trees_) out(i) += tree.predict(x.row(i));
    out(i) /= static_cast<double>(trees_.size());
  }
  return out;
}

json RandomForest::to_json() const {
  json blobs = json::array();
  for (const auto& tree : trees_) {
    const auto n = static_cast<Eigen::Index>(tree.nodes.size());
    Eigen::VectorXd feature(n), threshold(n), left(n), right(n), rate(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const TreeNode& node = tree.nodes[static_cast<std::size_t>(i)];
      feature(i) = node.feature;
      threshold(i) = node.threshold;
      left(i) = node.left;
      right(i) = node.right;
      rate(i) = node.positive_rate;
    }
    blobs.push_back({{"nodes", n},
                     {"feature", to_blob(feature)},
                     {"threshold", to_blob(threshold)},
                     {"left", to_blob(left)},
                     {"right", to_blob(right)},
                     {"positive_rate", to_blob(rate)}});
  }
  return model_envelope("rforest",
                        {{"dim", dim_},
                         {"n_trees", config_.n_trees},
                         {"max_depth", config_.max_depth},
                         {"min_samples_split", config_.min_samples_split}},
                        std::move(blobs));
}

RandomForest RandomForest::from_json(const json& doc) {
  const json& c = doc.at("config");
  RandomForest f;
  f.dim_ = c.at("dim").get<Eigen::Index>();
  f.config_ = {c.at("n_trees").get<int>(), c.at("max_depth").get<int>(), c.at("min_samples_split").get<int>()};
  for (const auto& t : doc.at("blobs")) {
    const auto n = t.at("nodes").get<Eigen::Index>();
    const auto feature = vector_from_blob(t.at("feature").get<std::string>(), n);
    const auto threshold = vector_from_blob(t.at("threshold").get<std::string>(), n);
    const auto left = vector_from_blob(t.at("left").get<std::string>(), n);
    const auto right = vector_from_blob(t.at("right").get<std::string>(), n);
    const auto rate = vector_from_blob(t.at("positive_rate").get<std::string>(), n);
    DecisionTree tree;
    for (Eigen::Index i = 0; i < n; ++i) {
      TreeNode node{static_cast<int>(feature(i)), threshold(i), static_cast<int>(left(i)), static_cast<int>(right(i)),
                    rate(i)};
      if (node.feature >= f.dim_ || (node.feature >= 0 && (node.left <= i || node.right <= i || node.left >= n ||
                                                           node.right >= n))) {
        throw ParseError("random forest model has an invalid node");
      }
      tree.nodes.push_back(node);
    }
    f.trees_.push_back(std::move(tree));
  }
  if (f.trees_.empty()) throw ParseError("random forest model has no trees");
  return f;
}

RandomForest fit_random_forest(const Eigen::MatrixXd& x, std::span<const int> y, std::uint64_t seed,
                               const ForestConfig& config) {
  check_training_set(x, y);
  if (config.n_trees < 1 || config.max_depth < 0) throw InvalidArgument("invalid random forest configuration");
  RandomForest forest;
  forest.config_ = config;
  forest.dim_ = x.cols();
  const auto n = static_cast<std::uint64_t>(x.rows());
  for (int t = 0; t < config.n_trees; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<Eigen::Index> bootstrap(static_cast<std::size_t>(n));
    for (auto& s : bootstrap) s = static_cast<Eigen::Index>(rng.below(n));
    TreeBuilder builder(x, y, config, rng);
    forest.trees_.push_back(builder.build(std::move(bootstrap)));
  }
  return forest;
}

}  // namespace abusekit::ml
