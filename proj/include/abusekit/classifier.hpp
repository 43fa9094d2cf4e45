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
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace abusekit::ml {

using Labels = std::vector<int>;

/// Common surface of every binary classifier: P(label = 1) per input row.
class BinaryClassifier {
 public:
  virtual ~BinaryClassifier() = default;

  virtual std::string kind() const = 0;
  virtual Eigen::Index input_dim() const = 0;
  /// One probability in [0, 1] per row of `x`.
  virtual Eigen::VectorXd predict_proba(const Eigen::MatrixXd& x) const = 0;
  /// `{format_version, kind, config, blobs}` envelope.
  virtual nlohmann::json to_json() const = 0;

  Labels predict(const Eigen::MatrixXd& x) const;
};

/// Throws InvalidArgument unless x/y agree in length, labels are 0/1, and
/// (when `need_both`) both classes occur.
void check_training_set(const Eigen::MatrixXd& x, std::span<const int> y, bool need_both = true);

std::unique_ptr<BinaryClassifier> classifier_from_json(const nlohmann::json& doc);
void save_classifier(const std::filesystem::path& path, const BinaryClassifier& model);
std::unique_ptr<BinaryClassifier> load_classifier(const std::filesystem::path& path);

/// Envelope helper shared by the concrete model types.
nlohmann::json model_envelope(const std::string& kind, nlohmann::json config, nlohmann::json blobs);

double sigmoid(double z);

}  // namespace abusekit::ml
