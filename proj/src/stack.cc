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


#include "abusekit/stack.hpp"

#include <algorithm>

#include "abusekit/error.hpp"
#include "abusekit/forest.hpp"
#include "abusekit/gpc.hpp"
#include "abusekit/mlp.hpp"
#include "abusekit/rng.hpp"

namespace abusekit::ml {
using nlohmann::json;

std::string_view to_string(BaseKind kind) {
  switch (kind) {
    case BaseKind::kGpc:
      return "gpc";
    case BaseKind::kMlp100:
      return "mlp100";
    case BaseKind::kLinSvm:
      return "linsvm";
    case BaseKind::kRandomForest:
      return "rforest";
    case BaseKind::kLogReg:
      return "logreg";
  }
  return "?";
}

std::unique_ptr<BinaryClassifier> fit_base(BaseKind kind, const Eigen::MatrixXd& x, std::span<const int> y,
                                           std::uint64_t seed) {
  check_training_set(x, y);
  switch (kind) {
    case BaseKind::kGpc:
      return std::make_unique<GaussianProcessClassifier>(fit_gpc(x, y));
    case BaseKind::kMlp100: {
      TrainConfig config;
      config.dropout = 0.0;
      config.epochs = 200;
      config.batch_size = static_cast<int>(std::min<Eigen::Index>(200, x.rows()));
      config.seed = seed;
      auto model = std::make_unique<Mlp>(std::vector<int>{static_cast<int>(x.cols()), 100, 2}, 0.0, 0.0,
                                         derive_seed(seed, 0));
      train_mlp(*model, x, y, config);
      return model;
    }
    case BaseKind::kLinSvm:
      return std::make_unique<LinearSvm>(fit_linear_svm(x, y));
    case BaseKind::kRandomForest:
      return std::make_unique<RandomForest>(fit_random_forest(x, y, seed));
    case BaseKind::kLogReg:
      return std::make_unique<LogisticRegression>(fit_logistic_regression(x, y));
  }
  throw InvalidArgument("unknown base classifier kind");
}

StackClassifier::StackClassifier(std::vector<std::unique_ptr<BinaryClassifier>> bases, LogisticRegression meta)
    : bases_(std::move(bases)), meta_(std::move(meta)) {
  if (bases_.empty()) throw InvalidArgument("a stack needs at least one base");
  if (meta_.input_dim() != static_cast<Eigen::Index>(bases_.size())) {
    throw InvalidArgument("meta learner input dim must equal the number of bases");
  }
}

Eigen::Index StackClassifier::input_dim() const { return bases_.front()->input_dim(); }

Eigen::MatrixXd StackClassifier::meta_features(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd z(x.rows(), static_cast<Eigen::Index>(bases_.size()));
  for (std::size_t b = 0; b < bases_.size(); ++b) z.col(static_cast<Eigen::Index>(b)) = bases_[b]->predict_proba(x);
  return z;
}

Eigen::VectorXd StackClassifier::predict_proba(const Eigen::MatrixXd& x) const {
  return meta_.predict_proba(meta_features(x));
}

json StackClassifier::to_json() const {
  json bases = json::array();
  for (const auto& b : bases_) bases.push_back(b->to_json());
  return model_envelope("stack", {{"dim", input_dim()}, {"n_bases", bases_.size()}},
                        {{"bases", std::move(bases)}, {"meta", meta_.to_json()}});
}

StackClassifier StackClassifier::from_json(const json& doc) {
  std::vector<std::unique_ptr<BinaryClassifier>> bases;
  for (const auto& b : doc.at("blobs").at("bases")) bases.push_back(classifier_from_json(b));
  return {std::move(bases), LogisticRegression::from_json(doc.at("blobs").at("meta"))};
}

StackClassifier train_stack(const Eigen::MatrixXd& x, std::span<const int> y, std::uint64_t seed) {
  check_training_set(x, y);
  std::vector<std::unique_ptr<BinaryClassifier>> bases;
  std::uint64_t stream = 0;
  for (BaseKind kind : kStackBases) bases.push_back(fit_base(kind, x, y, derive_seed(seed, stream++)));
  Eigen::MatrixXd z(x.rows(), static_cast<Eigen::Index>(bases.size()));
  for (std::size_t b = 0; b < bases.size(); ++b) z.col(static_cast<Eigen::Index>(b)) = bases[b]->predict_proba(x);
  return {std::move(bases), fit_logistic_regression(z, y)};
}

}  // namespace abusekit::ml
