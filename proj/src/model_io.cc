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


#include <cmath>

#include "abusekit/binary_io.hpp"
#include "abusekit/classifier.hpp"
#include "abusekit/error.hpp"
#include "abusekit/forest.hpp"
#include "abusekit/gpc.hpp"
#include "abusekit/linear_models.hpp"
#include "abusekit/mlp.hpp"
#include "abusekit/stack.hpp"

namespace abusekit::ml {
namespace fs = std::filesystem;
using nlohmann::json;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Labels BinaryClassifier::predict(const Eigen::MatrixXd& x) const {
  const Eigen::VectorXd p = predict_proba(x);
  Labels out(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(i)] = p(i) > 0.5 ? 1 : 0;
  return out;
}

void check_training_set(const Eigen::MatrixXd& x, std::span<const int> y, bool need_both) {
  if (x.rows() != static_cast<Eigen::Index>(y.size())) {
    throw InvalidArgument("got " + std::to_string(x.rows()) + " inputs but " + std::to_string(y.size()) + " labels");
  }
  if (x.rows() < 2) throw InvalidArgument("training needs at least 2 samples");
  if (!x.allFinite()) throw InvalidArgument("training inputs contain non-finite values");
  bool seen[2] = {false, false};
  for (int label : y) {
    if (label != 0 && label != 1) throw InvalidArgument("labels must be 0 or 1");
    seen[label] = true;
  }
  if (need_both && !(seen[0] && seen[1])) throw InvalidArgument("training set contains a single class");
}

json model_envelope(const std::string& kind, json config, json blobs) {
  return {{"format_version", 1}, {"kind", kind}, {"config", std::move(config)}, {"blobs", std::move(blobs)}};
}

std::unique_ptr<BinaryClassifier> classifier_from_json(const json& doc) {
  try {
    if (doc.at("format_version").get<int>() != 1) throw ParseError("unsupported model format_version");
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "ac" || kind == "tsp" || kind == "mlp") return std::make_unique<Mlp>(Mlp::from_json(doc));
    if (kind == "logreg") return std::make_unique<LogisticRegression>(LogisticRegression::from_json(doc));
    if (kind == "linsvm") return std::make_unique<LinearSvm>(LinearSvm::from_json(doc));
    if (kind == "gpc") return std::make_unique<GaussianProcessClassifier>(GaussianProcessClassifier::from_json(doc));
    if (kind == "rforest") return std::make_unique<RandomForest>(RandomForest::from_json(doc));
    if (kind == "stack") return std::make_unique<StackClassifier>(StackClassifier::from_json(doc));
    throw ParseError("unknown model kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
}

void save_classifier(const fs::path& path, const BinaryClassifier& model) {
  atomic_write_text(path, model.to_json().dump() + "\n");
}

std::unique_ptr<BinaryClassifier> load_classifier(const fs::path& path) {
  if (!fs::exists(path)) throw NotFoundError("model file not found: " + path.string());
  try {
    return classifier_from_json(json::parse(read_text_file(path)));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace abusekit::ml
